#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qprob/qprob.hpp"

namespace qprob::cli {

using Json = nlohmann::json;

// Malformed config, unknown preset or flag combination (exit 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// command: a subcommand name or "figure"; figure: the figure id.
// config: {"preset": name, "params": {...}} or {"explicit": {...}}; flag values are merged into params.
struct Request {
  std::string command;
  std::string figure;
  Json config = Json::object();
};

struct Payload {
  std::string kind;  // table | distribution | sweep | readout
  OutcomePairTable table;
  AtomDistribution dist;
  Sweep sweep;
  double aleph = 0.0;
  double residual = 0.0;  // normalization residual of the payload
  double residual_tol = 1e-9;
  Json extra = Json::object();
};

Payload run(const Request& r);

std::string payload_csv(const Payload& p);
Json payload_json(const Payload& p);

// Throws NumericalError if the normalization residual exceeds p.residual_tol.
void check_payload(const Payload& p);

}  // namespace qprob::cli
