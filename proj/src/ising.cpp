#include "qprob/ising.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "qprob/errors.hpp"
#include "qprob/parallel.hpp"

namespace qprob {

namespace {

bool is_unpaired(double k) { return std::abs(std::sin(k)) < 1e-12; }

// 1 / (1 + e^x)^2 without overflow
double inv_sq_one_plus_exp(double x) {
  if (x > 0) {
    const double e = std::exp(-x);
    return e * e / ((1 + e) * (1 + e));
  }
  const double e = std::exp(x);
  return 1.0 / ((1 + e) * (1 + e));
}

void require_noncritical(double k, double lambda) {
  if (dispersion(k, lambda) < tol::critical_gap) {
    std::ostringstream os;
    os << "mode k = " << k << " is gapless at lambda = " << lambda;
    throw UndefinedAngle(os.str());
  }
}

ModeTransitionTable unpaired_table(double k, const IsingQuenchSpec& s) {
  // single mode: H = 2 (lambda - cos k)(n - 1/2), diagonal in the occupation basis
  const double h0 = 2 * (s.lambda0 - std::cos(k)), h1 = 2 * (s.lambda1 - std::cos(k));
  ModeTransitionTable t;
  t.k = k;
  t.eps0 = dispersion(k, s.lambda0);
  t.eps1 = dispersion(k, s.lambda1);
  t.delta_k = angle_difference(k, s.lambda0, s.lambda1);
  t.Zk = 2 * std::cosh(s.beta * t.eps0 / 2);
  t.unpaired = true;
  // occupation n has pre-quench energy h0 (n - 1/2); weight 1 / (1 + e^{beta h0 (2n-1)})
  const double w0 = 1.0 / (1.0 + std::exp(-s.beta * h0));
  const double w1 = 1.0 / (1.0 + std::exp(s.beta * h0));
  t.entries = {{"0,0", -0.5 * (h1 - h0), w0}, {"1,1", 0.5 * (h1 - h0), w1}};
  return t;
}

}  // namespace

void IsingQuenchSpec::validate() const {
  if (N <= 0 || N % 2 != 0) throw InvalidArgument("N must be a positive even integer, got " + std::to_string(N));
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be finite and >= 0");
  if (!std::isfinite(lambda0) || !std::isfinite(lambda1)) throw InvalidArgument("lambda must be finite");
}

double ModeTransitionTable::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.q;
  return s;
}

double dispersion(double k, double lambda) {
  const double a = std::sin(k), b = lambda - std::cos(k);
  return 2.0 * std::sqrt(a * a + b * b);
}

double bogoliubov_angle(double k, double lambda) {
  require_noncritical(k, lambda);
  return std::atan2(std::sin(k), lambda - std::cos(k));
}

double angle_difference(double k, double lambda0, double lambda1) {
  return bogoliubov_angle(k, lambda1) - bogoliubov_angle(k, lambda0);
}

std::vector<double> quasimomenta(int N) {
  if (N <= 0 || N % 2 != 0) throw InvalidArgument("N must be a positive even integer, got " + std::to_string(N));
  std::vector<double> ks;
  for (int m = 1; m <= N / 2; ++m) ks.push_back(2.0 * std::numbers::pi * m / N);
  return ks;
}

ModeTransitionTable mode_table(double k, const IsingQuenchSpec& s) {
  s.validate();
  require_noncritical(k, s.lambda0);
  require_noncritical(k, s.lambda1);
  if (is_unpaired(k)) return unpaired_table(k, s);

  ModeTransitionTable t;
  t.k = k;
  t.eps0 = dispersion(k, s.lambda0);
  t.eps1 = dispersion(k, s.lambda1);
  t.delta_k = angle_difference(k, s.lambda0, s.lambda1);
  t.Zk = 2 * std::cosh(s.beta * t.eps0 / 2);
  t.unpaired = false;

  const double x = s.beta * t.eps0;
  const double a = inv_sq_one_plus_exp(-x);  // e^{beta eps}/Z^2
  const double b = inv_sq_one_plus_exp(x);   // e^{-beta eps}/Z^2
  const double z2inv = 1.0 / (t.Zk * t.Zk);
  const double c = std::cos(t.delta_k / 2), sn = std::sin(t.delta_k / 2);
  const double coh = s.p * std::sin(t.delta_k) * z2inv / 2;
  const double e0 = t.eps0, e1 = t.eps1;
  t.entries = {
      {"00,00", -e1 + e0, a * c * c - coh},
      {"00,11", e1 + e0, a * sn * sn + coh},
      {"01,01", 0.0, z2inv},
      {"10,10", 0.0, z2inv},
      {"11,00", -e1 - e0, b * sn * sn - coh},
      {"11,11", e1 - e0, b * c * c + coh},
  };
  return t;
}

ModeTransitionTable mode_oracle(double k, const IsingQuenchSpec& s) {
  s.validate();
  require_noncritical(k, s.lambda0);
  require_noncritical(k, s.lambda1);
  const double eps0 = dispersion(k, s.lambda0), eps1 = dispersion(k, s.lambda1);
  const double Zk = 2 * std::cosh(s.beta * eps0 / 2);

  if (is_unpaired(k)) {
    ComplexMatrix n = ComplexMatrix::Zero(2, 2);
    n(1, 1) = 1.0;
    const ComplexMatrix half = 0.5 * ComplexMatrix::Identity(2, 2);
    const Observable H0(2 * (s.lambda0 - std::cos(k)) * (n - half));
    const Observable H1(2 * (s.lambda1 - std::cos(k)) * (n - half));
    const auto rho = gibbs_state(H0, s.beta);
    const auto t = kdq(rho, H0, QuantumChannel::identity(2), H1);
    ModeTransitionTable out;
    out.k = k;
    out.eps0 = eps0;
    out.eps1 = eps1;
    out.delta_k = angle_difference(k, s.lambda0, s.lambda1);
    out.Zk = Zk;
    out.unpaired = true;
    // occupation basis: n = 0 has energy -(lambda - cos k); map branches by their projector
    auto occ = [](const Observable& O, std::size_t b) { return O.projector(b)(1, 1).real() > 0.5 ? 1 : 0; };
    std::vector<ModeTransition> rows(2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t f = 0; f < 2; ++f) {
        const int ni = occ(H0, i), nf = occ(H1, f);
        if (ni == nf)
          rows[ni] = {ni == 0 ? "0,0" : "1,1", t.outcomes2[f] - t.outcomes1[i], t.q(i, f).real()};
        else
          out.excluded += std::abs(t.q(i, f));
      }
    out.entries = rows;
    return out;
  }

  // two fermion modes (k, -k), Jordan-Wigner on basis index 2 n_k + n_{-k}
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  const ComplexMatrix ck = kron(a, pauli::I());
  const ComplexMatrix cm = kron(pauli::Z(), a);
  const ComplexMatrix I4 = ComplexMatrix::Identity(4, 4);
  const double D = angle_difference(k, s.lambda0, s.lambda1);

  // post-quench quasiparticles from the pre-quench ones
  const ComplexMatrix gk = std::cos(D / 2) * ck + std::sin(D / 2) * cm.adjoint();
  const ComplexMatrix gm = std::cos(-D / 2) * cm + std::sin(-D / 2) * ck.adjoint();
  const ComplexMatrix nk0 = ck.adjoint() * ck, nm0 = cm.adjoint() * cm;
  const ComplexMatrix nk1 = gk.adjoint() * gk, nm1 = gm.adjoint() * gm;
  const ComplexMatrix H0 = eps0 * (nk0 + nm0 - I4);
  const ComplexMatrix H1 = eps1 * (nk1 + nm1 - I4);

  // label the singly occupied states by momentum so every branch has rank 1
  const double eta = std::max(eps0, eps1) + 1.0;
  const Observable L0(H0 + eta * (nk0 - nm0)), L1(H1 + eta * (nk1 - nm1));

  ComplexVector vac = ComplexVector::Zero(4);
  vac(0) = 1.0;
  const ComplexVector s11 = ck.adjoint() * cm.adjoint() * vac;
  const ComplexVector s10 = ck.adjoint() * vac;
  const ComplexVector s01 = cm.adjoint() * vac;
  const double x = s.beta * eps0;
  const double z2inv = 1.0 / (Zk * Zk);
  ComplexMatrix rho = inv_sq_one_plus_exp(-x) * vac * vac.adjoint() + inv_sq_one_plus_exp(x) * s11 * s11.adjoint() +
                      z2inv * (s10 * s10.adjoint() + s01 * s01.adjoint());
  rho += s.p * z2inv * (s11 * vac.adjoint() + vac * s11.adjoint() + s10 * s01.adjoint() + s01 * s10.adjoint());

  const auto t = kdq(DensityOperator(rho), L0, QuantumChannel::identity(4), L1);

  // branch -> occupation label via the number operators
  auto label = [](const Observable& L, std::size_t b, const ComplexMatrix& nk, const ComplexMatrix& nm) {
    const ComplexMatrix& P = L.projector(b);
    const int a1 = trace_product(P, nk).real() > 0.5 ? 1 : 0;
    const int a2 = trace_product(P, nm).real() > 0.5 ? 1 : 0;
    return std::to_string(a1) + std::to_string(a2);
  };
  auto energy = [](const Observable& L, std::size_t b, const ComplexMatrix& H) {
    return trace_product(L.projector(b), H).real();
  };

  ModeTransitionTable out;
  out.k = k;
  out.eps0 = eps0;
  out.eps1 = eps1;
  out.delta_k = D;
  out.Zk = Zk;
  out.unpaired = false;
  const std::vector<std::string> order = {"00,00", "00,11", "01,01", "10,10", "11,00", "11,11"};
  out.entries.resize(order.size());
  for (std::size_t i = 0; i < t.outcomes1.size(); ++i)
    for (std::size_t f = 0; f < t.outcomes2.size(); ++f) {
      const std::string lab = label(L0, i, nk0, nm0) + "," + label(L1, f, nk1, nm1);
      const auto it = std::find(order.begin(), order.end(), lab);
      if (it == order.end()) {
        out.excluded += std::abs(t.q(i, f));
        continue;
      }
      out.entries[it - order.begin()] = {lab, energy(L1, f, H1) - energy(L0, i, H0), t.q(i, f).real()};
    }
  return out;
}

AtomDistribution assemble_distribution(const IsingQuenchSpec& s, const AssemblyOptions& opt) {
  s.validate();
  const auto ks = quasimomenta(s.N);
  std::vector<ModeTransitionTable> tables(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { tables[i] = mode_table(ks[i], s); });

  double scale = 0.0;
  for (const auto& t : tables) scale = std::max({scale, t.eps0, t.eps1});
  const double tol_abs = opt.coalesce_rel * std::max(scale, 1e-300);

  using A = std::pair<double, double>;
  std::vector<A> cur = {{0.0, 1.0}}, next;
  for (const auto& t : tables) {
    std::vector<A> rows;
    for (const auto& e : t.entries)
      if (e.q != 0.0) rows.push_back({e.W, e.q});
    if (cur.size() * rows.size() > opt.atom_cap) {
      std::ostringstream os;
      os << cur.size() * rows.size() << " atoms at k = " << t.k << " exceed the cap " << opt.atom_cap;
      throw AtomExplosion(os.str());
    }
    next.clear();
    next.reserve(cur.size() * rows.size());
    for (const auto& c : cur)
      for (const auto& r : rows) next.push_back({c.first + r.first, c.second * r.second});
    std::stable_sort(next.begin(), next.end(), [](const A& x, const A& y) { return x.first < y.first; });
    cur.clear();
    for (const auto& a : next) {
      if (!cur.empty() && a.first - cur.back().first <= tol_abs)
        cur.back().second += a.second;
      else
        cur.push_back(a);
    }
  }
  AtomDistribution d;
  d.atoms.reserve(cur.size());
  for (const auto& a : cur) d.atoms.push_back({a.first, cplx(a.second, 0.0)});
  return d;
}

std::vector<MomentsRow> moments_sweep(const IsingQuenchSpec& s, const std::vector<double>& p_values) {
  std::vector<MomentsRow> out(p_values.size());
  parallel_for(p_values.size(), [&](std::size_t j) {
    IsingQuenchSpec sp = s;
    sp.p = p_values[j];
    sp.validate();
    double mean = 0.0, var = 0.0;
    for (double k : quasimomenta(sp.N)) {
      const auto t = mode_table(k, sp);
      double m1 = 0.0, m2 = 0.0;
      for (const auto& e : t.entries) {
        m1 += e.q * e.W;
        m2 += e.q * e.W * e.W;
      }
      mean += m1;
      var += m2 - m1 * m1;
    }
    out[j] = {sp.p, mean, var};
  });
  return out;
}

}  // namespace qprob
