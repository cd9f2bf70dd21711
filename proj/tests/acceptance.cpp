// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures
// outside the ids given with --expect-fail (comma separated).

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "helpers.hpp"

using namespace qprob;
using testutil::maxabs;

namespace {

constexpr double PI = std::numbers::pi;
constexpr double SQRT2 = std::numbers::sqrt2;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;
std::set<int> expected_failures;
int unexpected = 0;

void run(int id, const std::string& name, double time_limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0 && dt > time_limit_s) {
    o.pass = false;
    o.detail << " [runtime " << dt << " s > " << time_limit_s << " s]";
  }
  if (!o.pass) {
    ++failures;
    if (!expected_failures.count(id)) ++unexpected;
  }
  std::printf("%s %2d %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), dt, o.detail.str().c_str());
  std::fflush(stdout);
}

// Grid search then Brent refinement of the bracketing cell.
std::pair<double, double> minimize(const std::function<double(double)>& f, double a, double b, int n) {
  double best_x = a, best = f(a);
  for (int k = 1; k <= n; ++k) {
    const double x = a + (b - a) * k / n;
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  const double h = (b - a) / n;
  const double lo = std::max(a, best_x - h), hi = std::min(b, best_x + h);
  auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits);
  if (r.second < best) return r;
  return {best_x, best};
}

// Global minimum over [a, b]: grid scan, Brent on the `refine` deepest grid-local minima.
double window_minimum(const std::function<double(double)>& f, double a, double b, int n, int refine) {
  std::vector<double> v(n + 1);
  for (int k = 0; k <= n; ++k) v[k] = f(a + (b - a) * k / n);
  std::vector<int> local;
  for (int k = 1; k < n; ++k)
    if (v[k] <= v[k - 1] && v[k] <= v[k + 1]) local.push_back(k);
  const int keep = std::min<int>(refine, static_cast<int>(local.size()));
  std::partial_sort(local.begin(), local.begin() + keep, local.end(), [&](int i, int j) { return v[i] < v[j]; });
  double best = *std::min_element(v.begin(), v.end());
  const double h = (b - a) / n;
  for (int r = 0; r < keep; ++r) {
    const double x = a + h * local[r];
    best = std::min(best, boost::math::tools::brent_find_minima(f, x - h, x + h, std::numeric_limits<double>::digits).second);
  }
  return best;
}

ComplexMatrix spin1_sx() {
  const double r = 1.0 / SQRT2;
  ComplexMatrix S(3, 3);
  S << 0, r, 0, r, 0, r, 0, r, 0;
  return S;
}

void spin1(Outcome& o) {
  ComplexMatrix Sz = ComplexMatrix::Zero(3, 3);
  Sz(0, 0) = 1;
  Sz(2, 2) = -1;
  ComplexVector psi(3);
  psi << 0, -1 / SQRT2, 1 / SQRT2;
  auto rho = DensityOperator::pure(psi);
  Observable Oz(Sz), Ox(spin1_sx());
  auto ch = QuantumChannel::identity(3);
  const auto& Pz = Oz.projector(0);
  const auto& Px = Ox.projector(2);
  const double p = tpm_joint(rho, Oz, ch, Ox)(0, 2);
  const double ps2 = trace_product(ch.heisenberg(Px), rho.matrix()).real();
  const double w = wtpm_probability(rho, Pz, ch, Px);
  const double q_rec = mhq_from_wtpm(p, ps2, w);
  const double q_direct = mhq(rho, Oz, ch, Ox)(0, 2);
  o.detail << " q_MHQ(-1,1)=" << q_rec;
  o.require(std::abs(q_rec - (1 - SQRT2) / 8) < 1e-10, "q_MHQ(-1,1) = (1-sqrt2)/8");
  o.require(std::abs(p - 0.125) < 1e-10, "p(-1,1) = 1/8");
  o.require(std::abs(ps2 - (3 - 2 * SQRT2) / 8) < 1e-10, "p_s2(1) = (3-2sqrt2)/8");
  o.require(std::abs(w - 0.375) < 1e-10, "w(-1,1) = 3/8");
  o.require(std::abs(q_rec - q_direct) < 1e-10, "wTPM closure equals direct MHQ");
}

void stern_gerlach(Outcome& o) {
  Observable Z(pauli::Z()), X(pauli::X()), Zl(-pauli::Z());
  auto ch = QuantumChannel::identity(2);
  auto flat = kdq(DensityOperator(identity(2) / 2.0), Z, ch, X);
  o.require(maxabs(flat.q - ComplexMatrix::Constant(2, 2, 0.25)) < 1e-10, "all KDQ = 1/4 at I/2");
  double worst_mean = 0, worst_diff = 0;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> R(0, 0.5), A(0, 2 * PI);
  for (int i = 0; i < 200; ++i) {
    const cplx r = std::polar(R(rng), A(rng));
    DensityOperator rho(testutil::qubit_state(r));
    auto d = distribution(kdq(rho, Z, ch, X));
    worst_mean = std::max(worst_mean, std::abs(moments(d, 1) - 2 * r.real()));
    // differences with |0> <-> -1, the labelling used for these four relations
    auto t = kdq(rho, Zl, ch, X);
    ComplexMatrix diff = t.q - t.p_tpm.cast<cplx>();
    ComplexMatrix expect(2, 2);
    expect << -r / 2.0, r / 2.0, -std::conj(r) / 2.0, std::conj(r) / 2.0;
    worst_diff = std::max(worst_diff, maxabs(diff - expect));
  }
  o.detail << " max|<do>-2Re rho01|=" << worst_mean << " max|(q-p)-closed|=" << worst_diff;
  o.require(worst_mean < 1e-10, "<do> = 2 Re rho01");
  o.require(worst_diff < 1e-10, "KDQ - TPM differences");
}

void ramsey(Outcome& o) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-2 * PI, 2 * PI);
  double worst = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int d = 1 + inst % 6;
    DensityOperator rho(testutil::random_density(rng, d));
    Observable O1(inst % 3 ? testutil::random_hermitian(rng, d) : testutil::random_degenerate_hermitian(rng, d));
    Observable O2(testutil::random_hermitian(rng, d));
    auto ch = inst % 2 ? QuantumChannel::unitary(testutil::random_unitary(rng, d))
                       : QuantumChannel::kraus(testutil::random_kraus(rng, d, 1 + inst % 3));
    std::vector<double> us(16);
    for (auto& u : us) u = U(rng);
    auto ro = ramsey_simulate(rho, O1, ch, O2, us);
    for (const auto& s : ro.samples)
      worst = std::max(worst, std::abs(cplx(s.sx, s.sy) - characteristic(rho, O1, ch, O2, s.u)));
  }
  const cplx r(0.27, -0.31);
  DensityOperator rho(testutil::qubit_state(r));
  std::vector<double> atoms{-2, 0, 2};
  auto rec = reconstruct_distribution(
      ramsey_simulate(rho, Observable(pauli::Z()), QuantumChannel::identity(2), Observable(pauli::X()), default_u_grid(atoms)),
      atoms);
  const cplx expect[3] = {(1.0 - 2.0 * r) / 4.0, (1.0 + 2.0 * I_UNIT * r.imag()) / 2.0, (1.0 + 2.0 * std::conj(r)) / 4.0};
  double werr = 0;
  for (int a = 0; a < 3; ++a) werr = std::max(werr, std::abs(rec.dist.atoms[a].weight - expect[a]));
  o.detail << " max readout error=" << worst << " reconstruction error=" << werr << " cond=" << rec.condition;
  o.require(worst < 1e-10, "readout = characteristic(u)");
  o.require(werr < 1e-8, "reconstructed qubit weights");
}

void detector(Outcome& o) {
  Observable Z(pauli::Z()), X(pauli::X());
  auto ch = QuantumChannel::identity(2);
  double worst = 0;
  for (double re : {-0.4, -0.1, 0.0, 0.3})
    for (double im : {-0.2, 0.0, 0.25}) {
      DensityOperator rho(testutil::qubit_state(cplx(re, im)));
      for (double kp = -3; kp <= 3; kp += 0.25) {
        const cplx g = 0.5 * (1.0 + std::cos(2 * kp) + 4.0 * I_UNIT * re * std::sin(kp));
        worst = std::max(worst, std::abs(detector_phase(rho, Z, ch, X, kp) - g));
      }
    }
  o.require(worst < 1e-10, "phase closed form");

  DetectorSpec spec{1.0, 0.0, 0.6, -6.0, 6.0, 2401};
  double asym[3];
  const double rs[3] = {0.0, 0.3, -0.3};
  for (int i = 0; i < 3; ++i) {
    auto P = detector_position(DensityOperator(testutil::qubit_state(rs[i])), Z, ch, X, spec);
    double mass = 0, first = 0, minv = 1e9, sym = 0;
    for (std::size_t j = 1; j < P.xs.size(); ++j) {
      const double h = P.xs[j] - P.xs[j - 1];
      mass += 0.5 * h * (P.density[j] + P.density[j - 1]);
      first += 0.5 * h * (P.xs[j] * P.density[j] + P.xs[j - 1] * P.density[j - 1]);
    }
    for (std::size_t j = 0; j < P.xs.size(); ++j) {
      minv = std::min(minv, P.density[j]);
      sym = std::max(sym, std::abs(P.density[j] - P.density[P.xs.size() - 1 - j]));
    }
    asym[i] = first;
    o.require(minv >= -1e-12, "P(x) >= 0");
    o.require(std::abs(mass - 1) < 1e-3, "integral 1");
    if (i == 0) o.require(sym < 1e-12, "symmetric at rho01 = 0");
  }
  o.detail << " phase err=" << worst << " <x> for rho01=0,0.3,-0.3: " << asym[0] << ", " << asym[1] << ", " << asym[2];
  o.require(asym[1] > 0 && asym[2] < 0 && std::abs(asym[1] + asym[2]) < 1e-10, "asymmetry flips with rho01");
}

void driven(Outcome& o) {
  double worst = 0;
  for (double Om : {0.3, 1.0, 2.41})
    for (double de : {0.5, 1.0, 1.7})
      for (double p : {0.0, 0.25, 0.5, 0.9})
        for (double c : {-0.5, -0.2, 0.0, 0.3, 0.5}) {
          if (c * c > p * (1 - p) + 1e-15) continue;
          for (double t = 0; t < 8; t += 0.7)
            worst = std::max(worst, maxabs(work_table(driven_qubit_preset(Om, de, p, c, t)).q -
                                           driven_qubit_analytic(Om, de, p, c, t)));
        }
  o.require(worst < 1e-10, "numerical KDQ = closed form");

  // min over t of Re q_if from the numerical table, as a function of x = Omega/delta
  auto min_over_t = [](int i, int f) {
    return [i, f](double x) {
      auto g = [&](double t) { return work_table(driven_qubit_preset(x, 1.0, 0.5, 0.5, t)).q(i, f).real(); };
      return minimize(g, 0.0, 2 * PI / x, 64).second;
    };
  };
  auto mm = minimize(min_over_t(0, 0), 0.1, 1.0, 36);
  auto pm = minimize(min_over_t(1, 0), 1.5, 4.0, 50);
  o.detail << " max|dq|=" << worst << " argmin q--: " << mm.first << " (" << mm.second << ") argmin q+-: " << pm.first
           << " (" << pm.second << ")";
  const double target = (1 - SQRT2) / 4;
  o.require(std::abs(mm.first - (SQRT2 - 1)) < 1e-6 && std::abs(mm.second - target) < 1e-10, "min Re q-- location/value");
  o.require(std::abs(pm.first - (SQRT2 + 1)) < 1e-6 && std::abs(pm.second - target) < 1e-10, "min Re q+- location/value");
}

void extraction(Outcome& o) {
  const double de = 1.0, Om = (1 + SQRT2) * de;
  double worst_tpm = 0, best_margin = -1e9;
  const int n = 801;
  std::vector<double> var_re(n), ts(n);
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * PI / Om * k / (n - 1);  // Omega t / pi in [0, 2]
    ts[k] = t;
    auto w = driven_qubit_preset(Om, de, 0.5, -0.5, t);
    worst_tpm = std::max(worst_tpm, std::abs(average_work_tpm(w)));
    const double s = Om * t / PI;
    if (s >= 0.6 && s <= 1.4)
      best_margin = std::max(best_margin, extractable_work(w) - driven_qubit_classical_bound(Om, de, 0.5, -0.5, t));
    var_re[k] = work_variance(w).re;
  }
  const int mid = (n - 1) / 2;  // Omega t = pi
  const bool local_min = var_re[mid] <= var_re[mid - 1] && var_re[mid] <= var_re[mid + 1];

  std::mt19937_64 rng(6);
  double worst_rob = -1e9;
  for (int i = 0; i < 1000; ++i) {
    const int d = 2 + i % 5;
    auto ch = i % 2 ? QuantumChannel::unitary(testutil::random_unitary(rng, d))
                    : QuantumChannel::kraus(testutil::random_kraus(rng, d, 2));
    WorkProtocol w(Observable(testutil::random_hermitian(rng, d)), Observable(testutil::random_hermitian(rng, d)), ch,
                   DensityOperator(testutil::random_density(rng, d)));
    auto v = work_variance(w);
    worst_rob = std::max(worst_rob, std::abs(v.im) - v.robertson_bound);
  }
  o.detail << " max|<W>_TPM|=" << worst_tpm << " max(W_ext - bound) on [0.6,1.4]=" << best_margin
           << " Re var at pi: " << var_re[mid] << " max(|Im var| - bound)=" << worst_rob;
  o.require(worst_tpm < 1e-10, "<W>_TPM = 0");
  o.require(best_margin > 0, "classical bound exceeded");
  o.require(local_min, "Re variance local minimum at Omega t = pi");
  o.require(worst_rob <= 1e-10, "Robertson bound");
}

void fluctuations(Outcome& o) {
  std::mt19937_64 rng(7);
  double e_tpm = 0, e_kdq = 0, e_gamma = 0;
  for (int i = 0; i < 300; ++i) {
    const int d = 2 + i % 5;
    const double beta = 0.2 + 0.01 * i;
    // unit spectral norm keeps exp(-beta W) of order one for the absolute tolerance
    Observable H1(testutil::unit_norm(testutil::random_hermitian(rng, d))),
        H2(testutil::unit_norm(testutil::random_hermitian(rng, d)));
    auto ch = i % 2 ? QuantumChannel::unitary(testutil::random_unitary(rng, d))
                    : QuantumChannel::kraus(testutil::random_kraus(rng, d, 2));
    WorkProtocol w(H1, H2, ch, DensityOperator(testutil::random_density(rng, d)));
    auto jt = jarzynski_tpm(w, beta);
    auto jk = jarzynski_kdq(w, beta);
    e_tpm = std::max(e_tpm, std::abs(jt.lhs - jt.rhs * jt.gamma));
    e_kdq = std::max(e_kdq, std::abs(jk.lhs - jk.rhs * jk.Gamma));
    // thermal state, unital channel
    ComplexMatrix U1 = testutil::random_unitary(rng, d), U2 = testutil::random_unitary(rng, d);
    auto unital = QuantumChannel::kraus({std::sqrt(0.4) * U1, std::sqrt(0.6) * U2});
    e_gamma = std::max(e_gamma, std::abs(jarzynski_kdq(WorkProtocol(H1, H2, unital, gibbs_state(H1, beta)), beta).Gamma - 1.0));
  }

  ComplexMatrix h(2, 2);
  h << -0.5, 0, 0, 0.5;
  Observable H(h);
  double e_ex = 0, e_chi0 = 0, e_prod = 0;
  std::uniform_real_distribution<double> ph(0, 2 * PI);
  for (int i = 0; i < 200; ++i) {
    const double bc = 0.4 + 0.01 * i, bh = 0.1 + 0.002 * i;
    ComplexMatrix rho = kron(gibbs_state(H, bc).matrix(), gibbs_state(H, bh).matrix());
    const double eta = (i % 4) * 0.3 * std::sqrt(rho(1, 1).real() * rho(2, 2).real());
    rho(1, 2) = std::polar(eta, ph(rng));
    rho(2, 1) = std::conj(rho(1, 2));
    ComplexMatrix U = ComplexMatrix::Zero(4, 4);
    U(0, 0) = std::polar(1.0, ph(rng));
    U(3, 3) = std::polar(1.0, ph(rng));
    U.block(1, 1, 2, 2) = testutil::random_unitary(rng, 2);
    auto ex = exchange_fluctuation(make_heat_spec(H, H, bc, bh, DensityOperator(rho), U));
    e_ex = std::max(e_ex, std::abs(ex.lhs - 1.0 - ex.upsilon));
    if (eta == 0.0) {
      e_chi0 = std::max(e_chi0, std::abs(ex.upsilon));
      e_prod = std::max(e_prod, std::abs(ex.lhs - 1.0));
    }
  }
  o.detail << " TPM=" << e_tpm << " KDQ=" << e_kdq << " |Gamma-1|=" << e_gamma << " exchange=" << e_ex
           << " |Upsilon| at chi=0: " << e_chi0 << " product thermal |lhs-1|=" << e_prod;
  o.require(e_tpm < 1e-9, "TPM Jarzynski with gamma");
  o.require(e_kdq < 1e-9, "KDQ Jarzynski with Gamma");
  o.require(e_gamma < 1e-9, "Gamma = 1");
  o.require(e_ex < 1e-9, "exchange relation");
  o.require(e_chi0 < 1e-9 && e_prod < 1e-9, "collapse to 1 without coherence");
}

void heat(Outcome& o) {
  auto closed = [](double eta, double xi, double th, double bc, double bh) {
    return -eta * std::cos(xi) * std::sin(2 * th) +
           std::pow(std::sin(th), 2) * (1 / (1 + std::exp(bc)) - 1 / (1 + std::exp(bh)));
  };
  auto check_set = [&](double p, double bc, double bh, std::vector<double> etas, bool validate, const char* tag) {
    double err = 0, max_eta0 = -1e9, min_eig = 1;
    std::vector<double> max_q(etas.size(), -1e9);
    for (int k = 0; k <= 400; ++k) {
      const double th = PI * k / 400;
      auto s0 = two_qubit_heat_preset(p, 0.0, 0.0, th, bc, bh, validate);
      max_eta0 = std::max(max_eta0, average_heat(s0));
      err = std::max(err, std::abs(average_heat(s0) - closed(0, 0, th, bc, bh)));
      for (std::size_t e = 0; e < etas.size(); ++e) {
        auto s = two_qubit_heat_preset(p, etas[e], 0.0, th, bc, bh, validate);
        min_eig = std::min(min_eig, s.min_eigenvalue);
        const double q = average_heat(s);
        err = std::max(err, std::max(std::abs(q - closed(etas[e], 0, th, bc, bh)),
                                     std::abs(average_heat(heat_table(s)) - q)));
        max_q[e] = std::max(max_q[e], q);
      }
    }
    o.detail << " " << tag << ": err=" << err << " max<Q>(eta=0)=" << max_eta0;
    for (std::size_t e = 0; e < etas.size(); ++e) o.detail << " max<Q>(eta=" << etas[e] << ")=" << max_q[e];
    o.detail << " min eig(rho)=" << min_eig;
    o.require(err < 1e-10, std::string(tag) + " closed form");
    o.require(max_eta0 <= 1e-15, std::string(tag) + " <Q> <= 0 at eta = 0");
    for (std::size_t e = 0; e < etas.size(); ++e) o.require(max_q[e] > 0, std::string(tag) + " backflow with coherence");
  };
  // literal parameters describe a non-positive operator; evaluated without the positivity check
  check_set(0.0, 10.0, 0.1, {0.2, 0.4}, false, "literal");
  check_set(0.4, 1.0, 0.1, {0.1, 0.2}, true, "valid");
}

void otoc_criterion(Outcome& o) {
  const double u = PI / 2;
  double e_id = 0, e_per = 0, e_even = 0, odd_weight = 0;
  // even-parity projector: span{|00>, |11>}
  ComplexMatrix Pe = ComplexMatrix::Zero(4, 4);
  Pe(0, 0) = Pe(3, 3) = 1.0;
  for (double J : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    auto s = two_qubit_otoc_preset(1.0, 1.1, J, 10.0);
    const ComplexMatrix re = Pe * s.rho.matrix() * Pe;
    odd_weight = std::max(odd_weight, 1.0 - re.trace().real());
    OtocSpec even(DensityOperator(re / re.trace().real()), s.Y, s.obs, s.H);
    const double T = 2 * PI / two_qubit_otoc_frequency(1.0, 1.1, J);
    for (double t = 0; t < 6; t += 0.05) {
      const cplx g = otoc_characteristic(s, t, u);
      e_id = std::max(e_id, std::abs(g - otoc(s, t, u)));
      e_per = std::max(e_per, std::abs(g - otoc_characteristic(s, t + T, u)));
      e_even = std::max(e_even, std::abs(otoc_characteristic(even, t, u) - otoc_characteristic(even, t + T, u)));
    }
  }
  o.require(e_id < 1e-10, "G(u,t) = F(t)");
  o.require(e_per < 1e-8, "period 2 pi / omega");

  // J = 2: only the (+1, +1) entry (table index 1, 1) goes negative
  auto s2 = two_qubit_otoc_preset(1.0, 1.1, 2.0, 10.0);
  const double T2 = 2 * PI / two_qubit_otoc_frequency(1.0, 1.1, 2.0);
  double mins[2][2] = {{1, 1}, {1, 1}};
  for (int k = 0; k <= 20000; ++k) {
    auto q = otoc_kdq(s2, T2 * k / 20000);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) mins[m][n] = std::min(mins[m][n], q.q(m, n).real());
  }
  o.require(mins[1][1] < 0 && mins[0][0] >= -1e-12 && mins[0][1] >= -1e-12 && mins[1][0] >= -1e-12, "only q00 negative");

  // contour quantity: min of Re G over 0 <= t <= 20 at fixed beta, as J grows
  bool monotone = true;
  double worst_rise = 0, worst_beta = 0, worst_J = 0;
  for (double beta : {0.1, 1.0, 10.0}) {
    double prev = 2;
    for (int j = 0; j <= 25; ++j) {
      const double J = 0.1 * j;
      auto s = two_qubit_otoc_preset(1.0, 1.1, J, beta);
      const double m = window_minimum([&](double t) { return otoc_characteristic(s, t, u).real(); }, 0, 20, 20000, 20);
      if (m - prev > worst_rise) worst_rise = m - prev, worst_beta = beta, worst_J = J;
      if (m > prev + 1e-9) monotone = false;
      prev = m;
    }
  }
  o.detail << " identity err=" << e_id << " period err=" << e_per << " (even-parity part " << e_even
           << ", max odd-parity population " << odd_weight << ")" << " min Re q at J=2: [+,+]=" << mins[1][1]
           << " others>=" << std::min({mins[0][0], mins[0][1], mins[1][0]}) << " largest rise of min Re G in J="
           << worst_rise << " (beta=" << worst_beta << ", J=" << worst_J << ")";
  o.require(monotone, "min Re G non-increasing in J on [0, 2.5]");
}

void loschmidt(Outcome& o) {
  const double B = 1.0;
  double e_g = 0, e_q = 0;
  bool neg = true, pos = true;
  for (double delta = 0.01; delta <= 5.0; delta += 0.07) {
    auto s = qubit_loschmidt_preset(B, delta);
    const double Bd = std::hypot(B, delta);
    auto q = loschmidt_kdq(s);
    for (int n = 0; n < 2; ++n)
      for (int m = 0; m < 2; ++m) {
        const double sn = n ? -1.0 : 1.0, sm = m ? -1.0 : 1.0;
        e_q = std::max(e_q, std::abs(q.q(1 - n, 1 - m) - (Bd + sm * (delta + sn * B)) / (4 * Bd)));
      }
    neg &= q.q(1, 0).real() < 0;  // paper label 01: +B then the lower H_delta level
    pos &= nonpositivity(q) > 0;
    for (double t = 0; t < 10; t += 0.37) {
      const cplx g = std::cos(B * t) * std::cos(Bd * t) +
                     (B * std::sin(B * t) - I_UNIT * delta * std::cos(B * t)) / Bd * std::sin(Bd * t);
      e_g = std::max(e_g, std::max(std::abs(loschmidt_amplitude(s, t) - g), std::abs(loschmidt_from_table(q, t) - g)));
    }
  }
  auto aleph = [&](double d) { return -nonpositivity(loschmidt_kdq(qubit_loschmidt_preset(B, d))); };
  auto peak = minimize(aleph, 0.01, 5.0, 500);
  o.detail << " G err=" << e_g << " q err=" << e_q << " argmax aleph=" << peak.first;
  o.require(e_g < 1e-10, "G(t) closed form");
  o.require(e_q < 1e-10, "q_nm closed form");
  o.require(neg, "q01 < 0");
  o.require(pos, "aleph > 0");
  o.require(std::abs(peak.first - B) < 0.2 * B, "aleph peak near B");
}

void ising(Outcome& o) {
  double e_or = 0, e_norm = 0;
  for (double k : {0.15, 0.6, PI / 3, 1.9, 2.8, PI})
    for (double l0 : {-0.5, 0.0, 0.7, 1.5})
      for (double l1 : {-1.3, 0.5, 1.0, 2.2})
        for (double beta : {0.0, 0.1, 2.0, 30.0})
          for (double p : {0.0, 0.5, 1.0}) {
            if (k == PI && (l0 == -1 || l1 == -1)) continue;
            IsingQuenchSpec s{12, l0, l1, beta, p};
            auto a = mode_table(k, s), b = mode_oracle(k, s);
            e_or = std::max(e_or, b.excluded);
            for (std::size_t i = 0; i < a.entries.size(); ++i) {
              const auto& x = a.entries[i];
              bool found = false;
              for (const auto& y : b.entries)
                if (y.label == x.label) {
                  found = true;
                  e_or = std::max(e_or, std::max(std::abs(x.q - y.q), std::abs(x.W - y.W)));
                }
              if (!found) e_or = 1;
            }
            e_norm = std::max(e_norm, std::abs(a.total() - 1.0));
          }
  o.require(e_or < 1e-10, "table = dense oracle");
  o.require(e_norm < 1e-12, "per-mode sum = 1");

  auto d0 = assemble_distribution({12, 0.0, 0.5, 0.1, 0.0});
  auto d1 = assemble_distribution({12, 0.0, 0.5, 0.1, 1.0});
  double min0 = 1, most_neg_pos = 0;
  for (const auto& a : d0.atoms) min0 = std::min(min0, a.weight.real());
  for (const auto& a : d1.atoms)
    if (a.value > 0) most_neg_pos = std::min(most_neg_pos, a.weight.real());
  o.require(min0 >= -1e-12, "p = 0 weights >= 0");
  o.require(most_neg_pos < 0, "p = 1 negative weight at W > 0");

  auto rows = moments_sweep({12, 0.0, 0.5, 0.1, 0.0}, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
  bool mono = true;
  double collinear = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    mono &= std::abs(rows[i].avg_W) >= std::abs(rows[i - 1].avg_W) && rows[i].var_W <= rows[i - 1].var_W;
    if (i + 1 < rows.size())
      collinear = std::max(collinear, std::abs(rows[i - 1].avg_W - 2 * rows[i].avg_W + rows[i + 1].avg_W));
  }
  o.require(collinear < 1e-9, "<W> affine in p");
  o.require(mono, "|<W>| up, variance down in p");

  const auto t0 = std::chrono::steady_clock::now();
  auto d20 = assemble_distribution({20, 0.0, 0.5, 0.1, 1.0});
  const double t20 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(std::abs(d20.total() - 1.0) < 1e-9, "N = 20 normalization");
  o.require(t20 < 60, "N = 20 under 60 s");
  o.detail << " oracle err=" << e_or << " norm err=" << e_norm << " min w(p=0)=" << min0
           << " most negative w at W>0 (p=1)=" << most_neg_pos << " collinearity=" << collinear << " N=20 atoms=" << d20.size()
           << " in " << t20 << " s";
}

void properties(Outcome& o) {
  std::mt19937_64 rng(12);
  int cases = 0;
  double e_norm = 0, e_ns = 0, e_conj = 0, e_mhq = 0, e_collapse = 0;
  bool implication = true;
  for (int i = 0; i < 1200; ++i) {
    const int d = 1 + i % 8;
    DensityOperator rho(testutil::random_density(rng, d));
    Observable O1(i % 2 ? testutil::random_hermitian(rng, d) : testutil::random_degenerate_hermitian(rng, d));
    Observable O2(i % 3 ? testutil::random_hermitian(rng, d) : testutil::random_degenerate_hermitian(rng, d));
    auto ch = i % 4 == 0   ? QuantumChannel::identity(d)
              : i % 4 == 1 ? QuantumChannel::unitary(testutil::random_unitary(rng, d))
                           : QuantumChannel::kraus(testutil::random_kraus(rng, d, 1 + i % 3));
    auto t1 = kdq(rho, O1, ch, O2, Ordering::KDQ1);
    auto t2 = kdq(rho, O1, ch, O2, Ordering::KDQ2);
    e_norm = std::max({e_norm, std::abs(t1.total() - 1.0), std::abs(t2.total() - 1.0)});
    e_ns = std::max(e_ns, no_signaling_residual(t1.q, rho, ch, O2));
    e_conj = std::max(e_conj, maxabs(t2.q - t1.q.conjugate()));
    e_mhq = std::max(e_mhq, (mhq(rho, O1, ch, O2) - t1.q.real()).cwiseAbs().maxCoeff());
    if (nonpositivity(t1) > 1e-8) {
      double nc = 0;
      for (std::size_t a = 0; a < O1.outcomes(); ++a) {
        nc = std::max(nc, commutator(rho.matrix(), O1.projector(a)).norm());
        for (std::size_t b = 0; b < O2.outcomes(); ++b)
          nc = std::max(nc, commutator(O1.projector(a), ch.heisenberg(O2.projector(b))).norm());
      }
      implication &= nc > 1e-8;
    }
    ++cases;

    // commuting instance: shared eigenbasis for rho, O1, O2 with identity dynamics
    ComplexMatrix V = testutil::random_unitary(rng, d);
    ComplexMatrix D1 = ComplexMatrix::Zero(d, d), D2 = ComplexMatrix::Zero(d, d), Dr = ComplexMatrix::Zero(d, d);
    std::uniform_real_distribution<double> u(0.05, 1);
    double tr = 0;
    for (int k = 0; k < d; ++k) {
      D1(k, k) = k % 2;
      D2(k, k) = u(rng);
      Dr(k, k) = u(rng);
      tr += Dr(k, k).real();
    }
    DensityOperator rc(V * Dr * V.adjoint() / tr);
    auto tc = kdq(rc, Observable(V * D1 * V.adjoint()), QuantumChannel::identity(d), Observable(V * D2 * V.adjoint()));
    e_collapse = std::max(e_collapse, maxabs(tc.q - tc.p_tpm.cast<cplx>()));
    ++cases;
  }
  o.detail << " cases=" << cases << " norm=" << e_norm << " no-signaling=" << e_ns << " conj=" << e_conj << " mhq=" << e_mhq
           << " collapse=" << e_collapse;
  o.require(cases >= 1000, ">= 1000 cases");
  o.require(e_norm < 1e-10, "sum q = 1");
  o.require(e_ns < 1e-10, "no-signaling residual");
  o.require(e_conj < 1e-12, "KDQ2 = conj KDQ1");
  o.require(e_mhq < 1e-12, "MHQ = Re KDQ");
  o.require(e_collapse < 1e-10, "TPM collapse");
  o.require(implication, "aleph > 0 implies non-commutativity");
}

}  // namespace

int main(int argc, char** argv) {
  for (int a = 1; a + 1 < argc; a += 2) {
    if (std::string(argv[a]) != "--expect-fail") continue;
    std::stringstream ids(argv[a + 1]);
    for (std::string id; std::getline(ids, id, ',');) expected_failures.insert(std::stoi(id));
  }
  run(1, "spin-1 wTPM golden values", 1.0, spin1);
  run(2, "Stern-Gerlach qubit", 0, stern_gerlach);
  run(3, "Ramsey exactness and reconstruction", 0, ramsey);
  run(4, "detector phase and position readout", 0, detector);
  run(5, "driven-qubit KDQ and minima", 10.0, driven);
  run(6, "extractable work, variance, Robertson bound", 0, extraction);
  run(7, "fluctuation identities", 0, fluctuations);
  run(8, "two-qubit heat exchange", 0, heat);
  run(9, "OTOC as KDQ characteristic function", 0, otoc_criterion);
  run(10, "Loschmidt echo qubit", 0, loschmidt);
  run(11, "Ising quench", 0, ising);
  run(12, "cross-cutting property suite", 120.0, properties);
  std::printf("%d failure(s), %d unexpected\n", failures, unexpected);
  return unexpected;
}
