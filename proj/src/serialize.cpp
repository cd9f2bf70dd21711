#include "qprob/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qprob/errors.hpp"

namespace qprob {

using nlohmann::json;

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string table_csv(const OutcomePairTable& t) {
  std::ostringstream os;
  os << "s1_index,s2_index,o1,o2,re_q,im_q,p_tpm\n";
  for (std::size_t i = 0; i < t.outcomes1.size(); ++i)
    for (std::size_t f = 0; f < t.outcomes2.size(); ++f)
      os << i << ',' << f << ',' << format_double(t.outcomes1[i]) << ',' << format_double(t.outcomes2[f]) << ','
         << format_double(t.q(i, f).real()) << ',' << format_double(t.q(i, f).imag()) << ','
         << format_double(t.p_tpm.size() ? t.p_tpm(i, f) : 0.0) << '\n';
  return os.str();
}

std::string distribution_csv(const AtomDistribution& d) {
  if (d.atoms.empty()) throw InvalidArgument("empty distribution");
  std::ostringstream os;
  os << "value,re_weight,im_weight\n";
  for (const auto& a : d.atoms)
    os << format_double(a.value) << ',' << format_double(a.weight.real()) << ',' << format_double(a.weight.imag())
       << '\n';
  return os.str();
}

std::string sweep_csv(const Sweep& s) {
  std::ostringstream os;
  for (std::size_t c = 0; c < s.columns.size(); ++c) os << (c ? "," : "") << s.columns[c];
  os << '\n';
  for (const auto& r : s.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << format_double(r[c]);
    os << '\n';
  }
  return os.str();
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidArgument("complex number must be a number or [re, im], got " + j.dump());
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
  const auto n = j.size();
  ComplexMatrix m(n, j[0].size());
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size()) throw InvalidArgument("ragged matrix rows");
    for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json table_json(const OutcomePairTable& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.outcomes1.size(); ++i)
    for (std::size_t f = 0; f < t.outcomes2.size(); ++f)
      rows.push_back({{"s1_index", i},
                      {"s2_index", f},
                      {"o1", t.outcomes1[i]},
                      {"o2", t.outcomes2[f]},
                      {"re_q", t.q(i, f).real()},
                      {"im_q", t.q(i, f).imag()},
                      {"p_tpm", t.p_tpm.size() ? t.p_tpm(i, f) : 0.0}});
  return {{"kind", "table"},
          {"ordering", t.ordering == Ordering::KDQ1 ? "KDQ1" : "KDQ2"},
          {"outcomes1", t.outcomes1},
          {"outcomes2", t.outcomes2},
          {"rows", rows}};
}

json distribution_json(const AtomDistribution& d) {
  if (d.atoms.empty()) throw InvalidArgument("empty distribution");
  json rows = json::array();
  for (const auto& a : d.atoms) rows.push_back({{"value", a.value}, {"re_weight", a.weight.real()}, {"im_weight", a.weight.imag()}});
  return {{"kind", "distribution"}, {"rows", rows}};
}

json sweep_json(const Sweep& s) {
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back(r);
  return {{"kind", "sweep"}, {"columns", s.columns}, {"rows", rows}};
}

OutcomePairTable table_from_json(const json& j) {
  OutcomePairTable t;
  t.outcomes1 = j.at("outcomes1").get<std::vector<double>>();
  t.outcomes2 = j.at("outcomes2").get<std::vector<double>>();
  t.ordering = j.at("ordering").get<std::string>() == "KDQ2" ? Ordering::KDQ2 : Ordering::KDQ1;
  t.q = ComplexMatrix::Zero(t.outcomes1.size(), t.outcomes2.size());
  t.p_tpm = RealMatrix::Zero(t.outcomes1.size(), t.outcomes2.size());
  for (const auto& r : j.at("rows")) {
    const auto i = r.at("s1_index").get<std::size_t>(), f = r.at("s2_index").get<std::size_t>();
    t.q(i, f) = cplx(r.at("re_q").get<double>(), r.at("im_q").get<double>());
    t.p_tpm(i, f) = r.at("p_tpm").get<double>();
  }
  return t;
}

AtomDistribution distribution_from_json(const json& j) {
  AtomDistribution d;
  for (const auto& r : j.at("rows"))
    d.atoms.push_back({r.at("value").get<double>(), cplx(r.at("re_weight").get<double>(), r.at("im_weight").get<double>())});
  if (d.atoms.empty()) throw InvalidArgument("empty distribution");
  return d;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << content;
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace qprob
