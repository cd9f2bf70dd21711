#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "scenarios.hpp"

using namespace qprob;
using qprob::cli::ConfigError;
using qprob::cli::Json;

namespace {

constexpr const char* VERSION = "0.1.0";

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// "re" or "re,im"
Json parse_complex(const std::string& s) {
  std::size_t used = 0;
  try {
    const double re = std::stod(s, &used);
    if (used == s.size()) return re;
    if (s[used] != ',') throw ConfigError("bad complex value '" + s + "'");
    const std::string rest = s.substr(used + 1);
    const double im = std::stod(rest, &used);
    if (used != rest.size()) throw ConfigError("bad complex value '" + s + "'");
    return Json::array({re, im});
  } catch (const std::logic_error&) {
    throw ConfigError("bad complex value '" + s + "'");
  }
}

Json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config " + path);
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasiprobability statistics of two-time measurements"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path, preset, out, format = "both", ordering, rho01;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  bool unchecked = false, as_distribution = false, moments = false;
  std::map<std::string, double> values;

  app.add_option("--config", config_path, "JSON scenario config");
  app.add_option("--preset", preset, "preset name");
  app.add_option("--out", out, "output path prefix (default: command name)");
  app.add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--threads", threads, "worker threads (default: QPROB_THREADS or 1)");
  app.add_option("--seed", seed, "seed for randomized helpers; physics is deterministic");
  app.add_option("--ordering", ordering, "KDQ1 or KDQ2");
  app.add_option("--rho01", rho01, "qubit coherence, 're' or 're,im'");
  app.add_flag("--unchecked", unchecked, "skip the positivity check of the heat preset state");
  app.add_flag("--distribution", as_distribution, "kdq: emit the outcome-difference distribution");
  app.add_flag("--moments", moments, "ising: emit the moments sweep over p");

  // flag -> params key
  const std::vector<std::pair<std::string, std::string>> numeric = {
      {"rho00", "rho00"},   {"Omega", "Omega"},     {"delta", "delta"},     {"p", "p"},
      {"c", "c"},           {"t", "t"},             {"eta", "eta"},         {"xi", "xi"},
      {"beta", "beta"},     {"beta-c", "beta_c"},   {"beta-h", "beta_h"},   {"B1", "B1"},
      {"B2", "B2"},         {"J", "J"},             {"u", "u"},             {"B", "B"},
      {"kappa", "kappa"},   {"p0", "p0"},           {"sigma", "sigma"},     {"x-min", "x_min"},
      {"x-max", "x_max"},   {"points", "points"},   {"N", "N"},             {"lambda0", "lambda0"},
      {"lambda1", "lambda1"}, {"atom-cap", "atom_cap"}};
  for (const auto& [flag, key] : numeric) {
    auto* opt = app.add_option_function<double>("--" + flag, [&values, key = key](double v) { values[key] = v; });
    opt->description("parameter " + key);
  }
  for (const std::string g : {"t", "theta", "u", "p", "beta", "J"})
    for (const std::string part : {"start", "stop", "count"}) {
      const std::string key = g + "_" + part;
      app.add_option_function<double>("--" + g + "-" + part, [&values, key](double v) { values[key] = v; })
          ->description("grid " + key);
    }

  std::string figure_id;
  for (const char* name : {"tpm", "kdq", "mhq", "ndqp", "wtpm", "ramsey", "detector", "work", "heat", "otoc", "loschmidt", "ising"})
    app.add_subcommand(name, std::string(name) + " scenario");
  auto* fig = app.add_subcommand("figure", "data series behind a figure");
  fig->add_option("id", figure_id, "figure id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    cli::Request req;
    req.command = command;
    req.figure = figure_id;
    if (!config_path.empty()) req.config = load_config(config_path);
    if (!req.config.is_object()) throw ConfigError("config must be a JSON object");
    if (!preset.empty()) {
      if (req.config.contains("explicit")) throw ConfigError("--preset given with an explicit config");
      req.config["preset"] = preset;
    }
    Json& params = req.config["params"];
    if (params.is_null()) params = Json::object();
    if (!params.is_object()) throw ConfigError("'params' must be an object");
    for (const auto& [k, v] : values) params[k] = v;
    if (!rho01.empty()) params["rho01"] = parse_complex(rho01);
    if (!ordering.empty()) params["ordering"] = ordering;
    if (unchecked) params["unchecked"] = true;
    if (as_distribution) params["distribution"] = true;
    if (moments) params["moments"] = true;

    if (threads) set_threads(*threads);

    const auto result = cli::run(req);
    cli::check_payload(result);

    const std::string label = command == "figure" ? "figure " + figure_id : command;
    Json meta = {{"command", label},
                 {"config_hash", fnv1a(label + "\n" + req.config.dump())},
                 {"version", VERSION},
                 {"timestamp", utc_now()},
                 {"threads", qprob::threads()}};
    if (seed) meta["seed"] = *seed;
    Json envelope = {{"metadata", meta},
                     {"summary", {{"aleph", result.aleph}, {"normalization_residual", result.residual}}},
                     {"payload", cli::payload_json(result)},
                     {"extra", result.extra}};

    if (out.empty()) out = command == "figure" ? figure_id : command;
    std::vector<std::string> written;
    if (format != "json") {
      write_text(out + ".csv", cli::payload_csv(result));
      written.push_back(out + ".csv");
    }
    if (format != "csv") {
      write_text(out + ".json", envelope.dump(2) + "\n");
      written.push_back(out + ".json");
    }
    std::printf("aleph = %s\nnormalization_residual = %s\n", format_double(result.aleph).c_str(),
                format_double(result.residual).c_str());
    for (const auto& w : written) std::printf("wrote %s\n", w.c_str());
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  }
}
