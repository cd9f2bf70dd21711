#include "scenarios.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

namespace qprob::cli {

namespace {

constexpr double PI = std::numbers::pi;
constexpr double SQRT2 = std::numbers::sqrt2;

// ---- parameter access ----

const Json& params_of(const Request& r) {
  static const Json empty = Json::object();
  auto it = r.config.find("params");
  return it == r.config.end() ? empty : *it;
}

double num(const Json& p, const std::string& key, double def) {
  auto it = p.find(key);
  if (it == p.end()) return def;
  if (!it->is_number()) throw ConfigError("parameter '" + key + "' must be a number");
  return it->get<double>();
}

int inum(const Json& p, const std::string& key, int def) {
  const double v = num(p, key, def);
  if (v != std::floor(v)) throw ConfigError("parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

cplx cnum(const Json& p, const std::string& key, cplx def) {
  auto it = p.find(key);
  if (it == p.end()) return def;
  try {
    return complex_from_json(*it);
  } catch (const InvalidArgument& e) {
    throw ConfigError("parameter '" + key + "': " + e.what());
  }
}

bool flag(const Json& p, const std::string& key, bool def) {
  auto it = p.find(key);
  if (it == p.end()) return def;
  if (!it->is_boolean()) throw ConfigError("parameter '" + key + "' must be true or false");
  return it->get<bool>();
}

std::string str(const Json& p, const std::string& key, const std::string& def) {
  auto it = p.find(key);
  if (it == p.end()) return def;
  if (!it->is_string()) throw ConfigError("parameter '" + key + "' must be a string");
  return it->get<std::string>();
}

// inclusive (start, stop, count) grid
std::vector<double> grid(const Json& p, const std::string& name, double start, double stop, int count) {
  start = num(p, name + "_start", start);
  stop = num(p, name + "_stop", stop);
  count = inum(p, name + "_count", count);
  if (count < 1) throw ConfigError(name + "_count must be >= 1");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
  return g;
}

Ordering ordering_of(const Json& p, Ordering def) {
  const std::string o = str(p, "ordering", def == Ordering::KDQ1 ? "KDQ1" : "KDQ2");
  if (o == "KDQ1") return Ordering::KDQ1;
  if (o == "KDQ2") return Ordering::KDQ2;
  throw ConfigError("ordering must be KDQ1 or KDQ2, got " + o);
}

// ---- shared setups ----

struct Setup {
  DensityOperator rho;
  Observable O1;
  QuantumChannel ch;
  Observable O2;
};

DensityOperator qubit_rho(const Json& p) {
  const double r00 = num(p, "rho00", 0.5);
  const cplx r01 = cnum(p, "rho01", 0.0);
  ComplexMatrix m(2, 2);
  m << r00, r01, std::conj(r01), 1 - r00;
  return DensityOperator(m);
}

ComplexMatrix spin1_sz() {
  ComplexMatrix S = ComplexMatrix::Zero(3, 3);
  S(0, 0) = 1;
  S(2, 2) = -1;
  return S;
}

ComplexMatrix spin1_sx() {
  const double r = 1.0 / SQRT2;
  ComplexMatrix S(3, 3);
  S << 0, r, 0, r, 0, r, 0, r, 0;
  return S;
}

Setup explicit_setup(const Json& e) {
  try {
    const int d = e.at("dim").get<int>();
    DensityOperator rho(matrix_from_json(e.at("rho")));
    Observable O1(matrix_from_json(e.at("O1")), "O1"), O2(matrix_from_json(e.at("O2")), "O2");
    QuantumChannel ch = QuantumChannel::identity(d);
    if (e.contains("channel")) {
      const auto& c = e.at("channel");
      if (c.contains("unitary") == c.contains("kraus")) throw ConfigError("channel needs exactly one of unitary/kraus");
      if (c.contains("unitary")) {
        ch = QuantumChannel::unitary(matrix_from_json(c.at("unitary")));
      } else {
        std::vector<ComplexMatrix> ops;
        for (const auto& k : c.at("kraus")) ops.push_back(matrix_from_json(k));
        ch = QuantumChannel::kraus(ops);
      }
    }
    if (rho.dim() != d) throw DimensionMismatch("rho is " + std::to_string(rho.dim()) + "-dimensional, dim = " + std::to_string(d));
    return {rho, O1, ch, O2};
  } catch (const Json::exception& ex) {
    throw ConfigError(std::string("explicit scenario: ") + ex.what());
  }
}

std::string preset_of(const Request& r, const std::string& def) {
  const bool has_preset = r.config.contains("preset"), has_explicit = r.config.contains("explicit");
  if (has_preset && has_explicit) throw ConfigError("config has both 'preset' and 'explicit'");
  if (has_explicit) return "explicit";
  if (!has_preset) return def;
  if (!r.config["preset"].is_string()) throw ConfigError("'preset' must be a string");
  return r.config["preset"].get<std::string>();
}

Setup setup_for(const Request& r, const std::string& def) {
  const Json& p = params_of(r);
  const std::string preset = preset_of(r, def);
  if (preset == "explicit") return explicit_setup(r.config["explicit"]);
  if (preset == "stern_gerlach" || preset == "qubit_ramsey" || preset == "gaussian_detector")
    return {qubit_rho(p), Observable(pauli::Z(), "sz"), QuantumChannel::identity(2), Observable(pauli::X(), "sx")};
  if (preset == "spin1_wtpm") {
    ComplexVector psi(3);
    psi << 0, -1 / SQRT2, 1 / SQRT2;
    return {DensityOperator::pure(psi), Observable(spin1_sz(), "Sz"), QuantumChannel::identity(3), Observable(spin1_sx(), "Sx")};
  }
  if (preset == "driven_qubit") {
    auto w = driven_qubit_preset(num(p, "Omega", 1.0), num(p, "delta", 1.0), num(p, "p", 0.5), num(p, "c", 0.5),
                                 num(p, "t", PI));
    return {w.rho, w.H1, w.channel, w.H2};
  }
  if (preset == "two_qubit_otoc") {
    auto s = two_qubit_otoc_preset(num(p, "B1", 1.0), num(p, "B2", 1.1), num(p, "J", 2.0), num(p, "beta", 10.0));
    return {s.rho, s.obs, QuantumChannel::unitary(heisenberg_perturbation(s, num(p, "t", 0.0)), 1e-9), s.obs};
  }
  if (preset == "qubit_loschmidt") {
    auto s = qubit_loschmidt_preset(num(p, "B", 1.0), num(p, "delta", 0.5));
    return {s.rho, s.H0, QuantumChannel::identity(2), s.Hdelta};
  }
  if (preset == "two_qubit_heat" || preset == "ising_quench")
    throw ConfigError("preset '" + preset + "' has no single two-time setup; use the '" +
                      (preset == "two_qubit_heat" ? std::string("heat") : std::string("ising")) + "' command");
  throw ConfigError("unknown preset '" + preset + "'");
}

// ---- payload helpers ----

Payload table_payload(OutcomePairTable t) {
  Payload p;
  p.kind = "table";
  p.aleph = nonpositivity(t);
  p.residual = std::abs(t.total() - 1.0);
  p.table = std::move(t);
  return p;
}

Payload dist_payload(AtomDistribution d) {
  Payload p;
  p.kind = "distribution";
  double s = 0;
  for (const auto& a : d.atoms) s += std::abs(a.weight);
  p.aleph = s - 1.0;
  p.residual = std::abs(d.total() - 1.0);
  p.dist = std::move(d);
  return p;
}

Json atoms_json(const AtomDistribution& d) {
  Json a = Json::array();
  for (const auto& x : d.atoms) a.push_back({x.value, x.weight.real(), x.weight.imag()});
  return a;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

// grid search followed by Brent on the best cell
// Grid scan, then Brent refinement of the deepest grid-local minima.
double minimum(const std::function<double(double)>& f, double a, double b, int n, int refine = 8) {
  std::vector<double> v(n + 1);
  for (int k = 0; k <= n; ++k) v[k] = f(a + (b - a) * k / n);
  std::vector<int> local;
  for (int k = 0; k <= n; ++k)
    if ((k == 0 || v[k] <= v[k - 1]) && (k == n || v[k] <= v[k + 1])) local.push_back(k);
  const int keep = std::min<int>(refine, static_cast<int>(local.size()));
  std::partial_sort(local.begin(), local.begin() + keep, local.end(), [&](int i, int j) { return v[i] < v[j]; });
  double best = *std::min_element(v.begin(), v.end());
  const double h = (b - a) / n;
  for (int r = 0; r < keep; ++r) {
    const double x = a + h * local[r];
    auto m = boost::math::tools::brent_find_minima(f, std::max(a, x - h), std::min(b, x + h),
                                                   std::numeric_limits<double>::digits);
    best = std::min(best, m.second);
  }
  return best;
}

// ---- commands ----

Payload cmd_tpm(const Request& r) {
  auto s = setup_for(r, "stern_gerlach");
  auto t = kdq(s.rho, s.O1, s.ch, s.O2);
  t.q = t.p_tpm.cast<cplx>();
  auto p = table_payload(std::move(t));
  p.extra["signaling_gap"] = no_signaling_residual(p.table.q, s.rho, s.ch, s.O2);
  return p;
}

Payload cmd_kdq(const Request& r) {
  const Json& prm = params_of(r);
  auto s = setup_for(r, "stern_gerlach");
  auto t = kdq(s.rho, s.O1, s.ch, s.O2, ordering_of(prm, Ordering::KDQ1));
  const double ns = no_signaling_residual(t.q, s.rho, s.ch, s.O2);
  if (flag(prm, "distribution", false)) {
    auto p = dist_payload(distribution(t));
    p.aleph = nonpositivity(t);
    p.extra["no_signaling_residual"] = ns;
    return p;
  }
  auto p = table_payload(std::move(t));
  p.extra["no_signaling_residual"] = ns;
  p.extra["distribution"] = atoms_json(distribution(p.table));
  return p;
}

Payload cmd_mhq(const Request& r) {
  auto s = setup_for(r, "stern_gerlach");
  auto t = kdq(s.rho, s.O1, s.ch, s.O2);
  const double aleph = nonpositivity(t);
  t.q = mhq(s.rho, s.O1, s.ch, s.O2).cast<cplx>();
  auto p = table_payload(std::move(t));
  p.extra["kdq_aleph"] = aleph;
  return p;
}

Payload cmd_ndqp(const Request& r) {
  const Json& prm = params_of(r);
  auto s = setup_for(r, "gaussian_detector");
  auto n = ndqp(s.rho, s.O1, s.ch, s.O2);
  auto p = dist_payload(ndqp_distribution(n));
  const double kp = num(prm, "kappa", 1.0) * num(prm, "p0", 0.0);
  p.extra["phase"] = to_json(detector_phase(n, kp));
  return p;
}

Payload cmd_wtpm(const Request& r) {
  auto s = setup_for(r, "spin1_wtpm");
  auto t = kdq(s.rho, s.O1, s.ch, s.O2);
  Payload p;
  p.kind = "sweep";
  p.sweep.columns = {"s1_index", "s2_index", "o1", "o2", "p_tpm", "p_s2", "w", "q_mhq", "re_q_kdq"};
  double total = 0, closure = 0;
  for (std::size_t a = 0; a < s.O1.outcomes(); ++a)
    for (std::size_t b = 0; b < s.O2.outcomes(); ++b) {
      const double ps2 = trace_product(s.ch.heisenberg(s.O2.projector(b)), s.rho.matrix()).real();
      const double w = wtpm_probability(s.rho, s.O1.projector(a), s.ch, s.O2.projector(b));
      const double q = mhq_from_wtpm(t.p_tpm(a, b), ps2, w);
      total += q;
      closure = std::max(closure, std::abs(q - t.q(a, b).real()));
      p.sweep.rows.push_back({double(a), double(b), t.outcomes1[a], t.outcomes2[b], t.p_tpm(a, b), ps2, w, q, t.q(a, b).real()});
    }
  p.aleph = nonpositivity(t);
  p.residual = std::abs(total - 1.0);
  p.extra["closure_residual"] = closure;
  return p;
}

Payload cmd_ramsey(const Request& r) {
  const Json& prm = params_of(r);
  auto s = setup_for(r, "qubit_ramsey");
  auto t = kdq(s.rho, s.O1, s.ch, s.O2);
  std::vector<double> atoms;
  for (const auto& a : distribution(t).atoms) atoms.push_back(a.value);
  std::vector<double> us = prm.contains("u_count") ? grid(prm, "u", 0.0, PI, 16) : default_u_grid(atoms);
  auto ro = ramsey_simulate(s.rho, s.O1, s.ch, s.O2, us);
  auto rec = reconstruct_distribution(ro, atoms);
  Payload p;
  p.kind = "readout";
  p.sweep.columns = {"u", "sx", "sy"};
  double worst = 0;
  for (const auto& x : ro.samples) {
    p.sweep.rows.push_back({x.u, x.sx, x.sy});
    worst = std::max(worst, std::abs(cplx(x.sx, x.sy) - characteristic(s.rho, s.O1, s.ch, s.O2, x.u)));
  }
  p.aleph = nonpositivity(t);
  p.residual = std::abs(rec.dist.total() - 1.0);
  p.extra["reconstruction"] = atoms_json(rec.dist);
  p.extra["least_squares_residual"] = rec.residual;
  p.extra["condition"] = rec.condition;
  p.extra["max_readout_error"] = worst;
  return p;
}

Payload cmd_detector(const Request& r) {
  const Json& prm = params_of(r);
  auto s = setup_for(r, "gaussian_detector");
  auto n = ndqp(s.rho, s.O1, s.ch, s.O2);
  DetectorSpec d{num(prm, "kappa", 1.0), num(prm, "p0", 0.0), num(prm, "sigma", 0.6), num(prm, "x_min", -5.0),
                 num(prm, "x_max", 5.0), inum(prm, "points", 1001)};
  auto P = detector_position(n, d);
  Payload p;
  p.kind = "sweep";
  p.sweep.columns = {"x", "density", "incoherent", "coherent"};
  for (std::size_t i = 0; i < P.xs.size(); ++i) p.sweep.rows.push_back({P.xs[i], P.density[i], P.incoherent[i], P.coherent[i]});
  p.aleph = nonpositivity(kdq(s.rho, s.O1, s.ch, s.O2));
  p.residual = std::abs(trapezoid(P.xs, P.density) - 1.0);
  p.residual_tol = tol::detector_tail;
  p.extra["mass_outside"] = P.mass_outside;
  p.extra["phase"] = to_json(detector_phase(n, d.kappa * d.p0));
  return p;
}

Payload cmd_work(const Request& r) {
  const Json& prm = params_of(r);
  const std::string preset = preset_of(r, "driven_qubit");
  auto s = setup_for(r, "driven_qubit");
  WorkProtocol w(s.O1, s.O2, s.ch, s.rho);
  auto p = table_payload(work_table(w));
  auto v = work_variance(w);
  auto b = classical_bound(w);
  p.extra["avg_work"] = b.avg_work_kdq;
  p.extra["avg_work_tpm"] = b.avg_work_tpm;
  p.extra["extractable_work"] = b.extractable_work;
  p.extra["classical_bound"] = b.classical_bound;
  p.extra["bound_violated"] = b.violation;
  p.extra["variance"] = to_json(v.variance);
  p.extra["robertson_bound"] = v.robertson_bound;
  if (preset == "driven_qubit")
    p.extra["driven_classical_bound"] = driven_qubit_classical_bound(
        num(prm, "Omega", 1.0), num(prm, "delta", 1.0), num(prm, "p", 0.5), num(prm, "c", 0.5), num(prm, "t", PI));
  if (prm.contains("beta")) {
    const double beta = num(prm, "beta", 1.0);
    auto jt = jarzynski_tpm(w, beta);
    auto jk = jarzynski_kdq(w, beta);
    p.extra["jarzynski"] = {{"beta", beta},   {"tpm_lhs", jt.lhs},         {"gamma", jt.gamma},
                            {"rhs", jt.rhs},  {"kdq_lhs", to_json(jk.lhs)}, {"Gamma", to_json(jk.Gamma)}};
  }
  return p;
}

HeatExchangeSpec heat_spec(const Json& prm, double eta, double theta) {
  return two_qubit_heat_preset(num(prm, "p", 0.4), eta, num(prm, "xi", 0.0), theta, num(prm, "beta_c", 1.0),
                               num(prm, "beta_h", 0.1), !flag(prm, "unchecked", false));
}

double heat_table_aleph(const HeatTable& t, double& residual) {
  cplx s = 0;
  double a = 0;
  for (const auto& q : t.q) s += q, a += std::abs(q);
  residual = std::max(residual, std::abs(s - 1.0));
  return a - 1.0;
}

Payload cmd_heat(const Request& r) {
  const Json& prm = params_of(r);
  if (preset_of(r, "two_qubit_heat") != "two_qubit_heat") throw ConfigError("heat supports only the two_qubit_heat preset");
  const double eta = num(prm, "eta", 0.0);
  Payload p;
  p.kind = "sweep";
  p.sweep.columns = {"theta", "avg_Q", "avg_Q_tpm", "strong_backflow"};
  double min_eig = 1;
  for (double th : grid(prm, "theta", 0.0, PI, 201)) {
    auto s = heat_spec(prm, eta, th);
    auto s0 = heat_spec(prm, 0.0, th);
    min_eig = std::min(min_eig, s.min_eigenvalue);
    const double q = average_heat(s);
    p.aleph = std::max(p.aleph, heat_table_aleph(heat_table(s), p.residual));
    p.sweep.rows.push_back({th, q, average_heat(s0), strong_backflow(s, q) ? 1.0 : 0.0});
  }
  p.extra["min_eigenvalue"] = min_eig;
  return p;
}

const char* otoc_label(std::size_t m, std::size_t n) {
  // table index 1 is the +1 outcome, labelled 0
  static const char* names[2][2] = {{"11", "10"}, {"01", "00"}};
  return names[m][n];
}

Payload cmd_otoc(const Request& r) {
  const Json& prm = params_of(r);
  if (preset_of(r, "two_qubit_otoc") != "two_qubit_otoc") throw ConfigError("otoc supports only the two_qubit_otoc preset");
  auto s = two_qubit_otoc_preset(num(prm, "B1", 1.0), num(prm, "B2", 1.1), num(prm, "J", 2.0), num(prm, "beta", 10.0));
  const double u = num(prm, "u", PI / 2);
  Payload p;
  p.kind = "sweep";
  p.sweep.columns = {"t", "re_G", "im_G", "re_F", "im_F", "aleph"};
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < 2; ++n) p.sweep.columns.push_back(std::string("re_q") + otoc_label(m, n));
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < 2; ++n) p.sweep.columns.push_back(std::string("im_q") + otoc_label(m, n));
  for (double t : grid(prm, "t", 0.0, 20.0, 401)) {
    auto q = otoc_kdq(s, t);
    const cplx G = otoc_characteristic(q, u), F = otoc(s, t, u);
    std::vector<double> row{t, G.real(), G.imag(), F.real(), F.imag(), nonpositivity(q)};
    for (int part = 0; part < 2; ++part)
      for (std::size_t m = 0; m < 2; ++m)
        for (std::size_t n = 0; n < 2; ++n) row.push_back(part ? q.q(m, n).imag() : q.q(m, n).real());
    p.aleph = std::max(p.aleph, row[5]);
    p.residual = std::max(p.residual, std::abs(q.total() - 1.0));
    p.sweep.rows.push_back(std::move(row));
  }
  p.extra["omega"] = two_qubit_otoc_frequency(num(prm, "B1", 1.0), num(prm, "B2", 1.1), num(prm, "J", 2.0));
  return p;
}

Payload cmd_loschmidt(const Request& r) {
  const Json& prm = params_of(r);
  if (preset_of(r, "qubit_loschmidt") != "qubit_loschmidt") throw ConfigError("loschmidt supports only the qubit_loschmidt preset");
  auto s = qubit_loschmidt_preset(num(prm, "B", 1.0), num(prm, "delta", 0.5));
  auto p = table_payload(loschmidt_kdq(s));
  Json series = Json::array();
  for (double t : grid(prm, "t", 0.0, 20.0, 201)) {
    const cplx g = loschmidt_from_table(p.table, t);
    series.push_back({t, g.real(), g.imag()});
  }
  p.extra["echo"] = series;
  return p;
}

IsingQuenchSpec ising_spec(const Json& prm) {
  IsingQuenchSpec s{inum(prm, "N", 12), num(prm, "lambda0", 0.0), num(prm, "lambda1", 0.5), num(prm, "beta", 0.1),
                    num(prm, "p", 0.0)};
  s.validate();
  return s;
}

Payload cmd_ising(const Request& r) {
  const Json& prm = params_of(r);
  if (preset_of(r, "ising_quench") != "ising_quench") throw ConfigError("ising supports only the ising_quench preset");
  auto s = ising_spec(prm);
  if (flag(prm, "moments", false)) {
    Payload p;
    p.kind = "sweep";
    p.sweep.columns = {"p", "avg_W", "var_W"};
    for (const auto& row : moments_sweep(s, grid(prm, "p", 0.0, 1.0, 11))) p.sweep.rows.push_back({row.p, row.avg_W, row.var_W});
    return p;
  }
  AssemblyOptions opt;
  if (prm.contains("atom_cap")) opt.atom_cap = static_cast<std::size_t>(num(prm, "atom_cap", 1e7));
  return dist_payload(assemble_distribution(s, opt));
}

// ---- figures ----

Payload sweep_payload(std::vector<std::string> cols) {
  Payload p;
  p.kind = "sweep";
  p.sweep.columns = std::move(cols);
  return p;
}

Payload fig2(const Json& prm) {
  auto p = sweep_payload({"x", "P_rho01_0", "P_rho01_0.3", "P_rho01_-0.3"});
  p.residual_tol = tol::detector_tail;
  DetectorSpec d{num(prm, "kappa", 1.0), 0.0, num(prm, "sigma", 0.6), -5.0, 5.0, 1001};
  std::vector<PositionDistribution> P;
  for (double r01 : {0.0, 0.3, -0.3}) {
    ComplexMatrix m(2, 2);
    m << 0.5, r01, r01, 0.5;
    P.push_back(detector_position(DensityOperator(m), Observable(pauli::Z()), QuantumChannel::identity(2),
                                  Observable(pauli::X()), d));
    p.residual = std::max(p.residual, std::abs(trapezoid(P.back().xs, P.back().density) - 1.0));
  }
  for (std::size_t i = 0; i < P[0].xs.size(); ++i) p.sweep.rows.push_back({P[0].xs[i], P[0].density[i], P[1].density[i], P[2].density[i]});
  return p;
}

Payload fig3(double ratio) {
  auto p = sweep_payload({"omega_t_over_pi", "re_q_mm", "re_q_pm", "re_q_mp", "re_q_pp"});
  const double Om = ratio;
  for (int k = 0; k <= 400; ++k) {
    const double s = 4.0 * k / 400, t = s * PI / Om;
    auto tab = work_table(driven_qubit_preset(Om, 1.0, 0.5, 0.5, t));
    p.sweep.rows.push_back({s, tab.q(0, 0).real(), tab.q(1, 0).real(), tab.q(0, 1).real(), tab.q(1, 1).real()});
    p.aleph = std::max(p.aleph, nonpositivity(tab));
    p.residual = std::max(p.residual, std::abs(tab.total() - 1.0));
  }
  return p;
}

Payload fig4(bool variance) {
  auto p = variance ? sweep_payload({"omega_t_over_pi", "re_var", "im_var", "var_tpm"})
                    : sweep_payload({"omega_t_over_pi", "avg_W", "avg_W_tpm", "minus_classical_bound"});
  const double Om = 1 + SQRT2, de = 1.0;
  for (int k = 0; k <= 400; ++k) {
    const double s = 2.0 * k / 400, t = s * PI / Om;
    auto w = driven_qubit_preset(Om, de, 0.5, -0.5, t);
    auto tab = work_table(w);
    p.aleph = std::max(p.aleph, nonpositivity(tab));
    p.residual = std::max(p.residual, std::abs(tab.total() - 1.0));
    if (variance) {
      auto v = work_variance(w);
      double m1 = 0, m2 = 0;
      for (int i = 0; i < 2; ++i)
        for (int f = 0; f < 2; ++f) {
          const double W = tab.outcomes2[f] - tab.outcomes1[i];
          m1 += tab.p_tpm(i, f) * W;
          m2 += tab.p_tpm(i, f) * W * W;
        }
      p.sweep.rows.push_back({s, v.re, v.im, m2 - m1 * m1});
    } else {
      p.sweep.rows.push_back({s, average_work(w), average_work_tpm(w), -driven_qubit_classical_bound(Om, de, 0.5, -0.5, t)});
    }
  }
  return p;
}

Payload fig5() {
  auto p = sweep_payload({"J", "t", "omega_t", "re_G", "im_G", "aleph", "re_q00", "re_q01", "re_q10", "re_q11", "im_q00",
                          "im_q01", "im_q10", "im_q11"});
  for (double J : {0.5, 1.5, 2.0, 2.5}) {
    auto s = two_qubit_otoc_preset(1.0, 1.1, J, 10.0);
    const double om = two_qubit_otoc_frequency(1.0, 1.1, J);
    for (int k = 0; k <= 400; ++k) {
      const double t = 5.0 * k / 400;
      auto q = otoc_kdq(s, t);
      const cplx G = otoc_characteristic(q, PI / 2);
      // label 0 is the +1 outcome (table index 1)
      p.sweep.rows.push_back({J, t, om * t, G.real(), G.imag(), nonpositivity(q), q.q(1, 1).real(), q.q(1, 0).real(),
                              q.q(0, 1).real(), q.q(0, 0).real(), q.q(1, 1).imag(), q.q(1, 0).imag(), q.q(0, 1).imag(),
                              q.q(0, 0).imag()});
      p.aleph = std::max(p.aleph, nonpositivity(q));
      p.residual = std::max(p.residual, std::abs(q.total() - 1.0));
    }
  }
  return p;
}

Payload fig5f(const Json& prm) {
  auto p = sweep_payload({"beta", "J", "min_re_G"});
  const auto betas = grid(prm, "beta", 0.1, 10.0, 12);
  const auto Js = grid(prm, "J", 0.0, 2.5, 26);
  const double t_stop = num(prm, "t_stop", 20.0);
  if (!(t_stop > 0)) throw ConfigError("t_stop must be positive");
  std::vector<double> out(betas.size() * Js.size());
  parallel_for(out.size(), [&](std::size_t i) {
    auto s = two_qubit_otoc_preset(1.0, 1.1, Js[i % Js.size()], betas[i / Js.size()]);
    // two incommensurate block frequencies: scan the whole window, ~100 points per fast period
    const double T = 2 * PI / two_qubit_otoc_frequency(1.0, 1.1, Js[i % Js.size()]);
    const int n = static_cast<int>(std::ceil(100 * t_stop / T));
    out[i] = minimum([&](double t) { return otoc_characteristic(s, t, PI / 2).real(); }, 0.0, t_stop, n);
  });
  for (std::size_t i = 0; i < out.size(); ++i) p.sweep.rows.push_back({betas[i / Js.size()], Js[i % Js.size()], out[i]});
  return p;
}

Payload fig6(const Json& prm) {
  auto p = sweep_payload({"theta", "Q_eta_0", "Q_eta_0.2", "Q_eta_0.4"});
  Json lit = {{"p", 0.0}, {"xi", 0.0}, {"beta_c", 10.0}, {"beta_h", 0.1}, {"unchecked", true}};
  for (auto it = prm.begin(); it != prm.end(); ++it) lit[it.key()] = it.value();
  double min_eig = 1;
  for (int k = 0; k <= 200; ++k) {
    const double th = PI * k / 200;
    std::vector<double> row{th};
    for (double eta : {0.0, 0.2, 0.4}) {
      auto s = heat_spec(lit, eta, th);
      min_eig = std::min(min_eig, s.min_eigenvalue);
      p.aleph = std::max(p.aleph, heat_table_aleph(heat_table(s), p.residual));
      row.push_back(average_heat(s));
    }
    p.sweep.rows.push_back(row);
  }
  p.extra["min_eigenvalue"] = min_eig;
  return p;
}

Payload fig7(const Json& prm) {
  auto p = sweep_payload({"p", "value", "re_weight", "im_weight"});
  for (double pc : {0.0, 1.0}) {
    Json q = prm;
    q["p"] = pc;
    auto d = assemble_distribution(ising_spec(q));
    p.residual = std::max(p.residual, std::abs(d.total() - 1.0));
    double s = 0;
    for (const auto& a : d.atoms) {
      p.sweep.rows.push_back({pc, a.value, a.weight.real(), a.weight.imag()});
      s += std::abs(a.weight);
    }
    p.aleph = std::max(p.aleph, s - 1.0);
  }
  return p;
}

Payload fig8(const Json& prm) {
  auto p = sweep_payload({"p", "avg_W", "abs_avg_W", "var_W"});
  for (const auto& r : moments_sweep(ising_spec(prm), grid(prm, "p", 0.0, 1.0, 21)))
    p.sweep.rows.push_back({r.p, r.avg_W, std::abs(r.avg_W), r.var_W});
  return p;
}

Payload fig9a() {
  auto p = sweep_payload({"delta", "t", "re_G", "im_G"});
  for (double d : {0.1, 0.4, 0.7, 1.0}) {
    auto q = loschmidt_kdq(qubit_loschmidt_preset(1.0, d));
    p.residual = std::max(p.residual, std::abs(q.total() - 1.0));
    p.aleph = std::max(p.aleph, nonpositivity(q));
    for (int k = 0; k <= 400; ++k) {
      const double t = 20.0 * k / 400;
      const cplx g = loschmidt_from_table(q, t);
      p.sweep.rows.push_back({d, t, g.real(), g.imag()});
    }
  }
  return p;
}

Payload fig9b() {
  auto p = sweep_payload({"delta", "q00", "q01", "q10", "q11", "aleph"});
  for (int k = 1; k <= 300; ++k) {
    const double d = 3.0 * k / 300;
    auto q = loschmidt_kdq(qubit_loschmidt_preset(1.0, d));
    p.residual = std::max(p.residual, std::abs(q.total() - 1.0));
    const double a = nonpositivity(q);
    p.aleph = std::max(p.aleph, a);
    // label 0 is the upper level (table index 1)
    p.sweep.rows.push_back({d, q.q(1, 1).real(), q.q(1, 0).real(), q.q(0, 1).real(), q.q(0, 0).real(), a});
  }
  return p;
}

Payload cmd_figure(const Request& r) {
  const Json& prm = params_of(r);
  const std::string& id = r.figure;
  if (id == "fig2") return fig2(prm);
  if (id == "fig3a") return fig3(SQRT2 - 1);
  if (id == "fig3b") return fig3(SQRT2 + 1);
  if (id == "fig4") return fig4(false);
  if (id == "fig4var") return fig4(true);
  if (id == "fig5") return fig5();
  if (id == "fig5f") return fig5f(prm);
  if (id == "fig6") return fig6(prm);
  if (id == "fig7") return fig7(prm);
  if (id == "fig8") return fig8(prm);
  if (id == "fig9a") return fig9a();
  if (id == "fig9b") return fig9b();
  throw ConfigError("unknown figure id '" + id +
                    "' (fig2, fig3a, fig3b, fig4, fig4var, fig5, fig5f, fig6, fig7, fig8, fig9a, fig9b)");
}

}  // namespace

Payload run(const Request& r) {
  static const std::map<std::string, std::function<Payload(const Request&)>> commands = {
      {"tpm", cmd_tpm},       {"kdq", cmd_kdq},         {"mhq", cmd_mhq},     {"ndqp", cmd_ndqp},
      {"wtpm", cmd_wtpm},     {"ramsey", cmd_ramsey},   {"detector", cmd_detector},
      {"work", cmd_work},     {"heat", cmd_heat},       {"otoc", cmd_otoc},   {"loschmidt", cmd_loschmidt},
      {"ising", cmd_ising},   {"figure", cmd_figure}};
  auto it = commands.find(r.command);
  if (it == commands.end()) throw ConfigError("unknown command '" + r.command + "'");
  if (!r.config.is_object()) throw ConfigError("config must be a JSON object");
  return it->second(r);
}

std::string payload_csv(const Payload& p) {
  if (p.kind == "table") return table_csv(p.table);
  if (p.kind == "distribution") return distribution_csv(p.dist);
  return sweep_csv(p.sweep);
}

Json payload_json(const Payload& p) {
  if (p.kind == "table") return table_json(p.table);
  if (p.kind == "distribution") return distribution_json(p.dist);
  Json j = sweep_json(p.sweep);
  j["kind"] = p.kind;
  return j;
}

void check_payload(const Payload& p) {
  const double tol = p.residual_tol;
  double residual = p.residual;
  // recompute from what is about to be written
  if (p.kind == "table") residual = std::abs(p.table.total() - 1.0);
  if (p.kind == "distribution") residual = std::abs(p.dist.total() - 1.0);
  if (!(residual <= tol)) throw NumericalError("normalization residual " + std::to_string(residual) + " exceeds " + std::to_string(tol));
}

}  // namespace qprob::cli
