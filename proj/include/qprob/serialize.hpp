#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qprob/quasiprob.hpp"

namespace qprob {

// Named columns of doubles; used for parameter sweeps and time series.
struct Sweep {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// %.17g, so CSV output is byte-identical for identical inputs
std::string format_double(double v);

std::string table_csv(const OutcomePairTable& t);
std::string distribution_csv(const AtomDistribution& d);
std::string sweep_csv(const Sweep& s);

nlohmann::json table_json(const OutcomePairTable& t);
nlohmann::json distribution_json(const AtomDistribution& d);
nlohmann::json sweep_json(const Sweep& s);

OutcomePairTable table_from_json(const nlohmann::json& j);
AtomDistribution distribution_from_json(const nlohmann::json& j);

// complex as [re, im]
nlohmann::json to_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);
// matrix as rows of entries; each entry a number or [re, im]
ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

void write_text(const std::string& path, const std::string& content);

}  // namespace qprob
