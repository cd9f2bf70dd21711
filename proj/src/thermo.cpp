#include "qprob/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qprob/errors.hpp"

namespace qprob {

namespace {

// Z * sum e^{beta E} Pi, with the floor check on e^{-beta E}/Z
ComplexMatrix inverse_thermal(const Observable& H, double beta) {
  const double lz = log_partition(H, beta);
  ComplexMatrix out = ComplexMatrix::Zero(H.dim(), H.dim());
  for (const auto& b : H.spectrum().branches) {
    const double le = -beta * b.value - lz;
    if (le < std::log(tol::thermal_floor)) {
      std::ostringstream os;
      os << "thermal eigenvalue exp(" << le << ") below " << tol::thermal_floor << " at beta = " << beta;
      throw SingularThermalState(os.str());
    }
    out += std::exp(-le) * b.projector;
  }
  return out;
}

cplx expect(const ComplexMatrix& A, const DensityOperator& rho) { return trace_product(A, rho.matrix()); }

}  // namespace

WorkProtocol::WorkProtocol(Observable h1, Observable h2, QuantumChannel ch, DensityOperator r)
    : H1(std::move(h1)), H2(std::move(h2)), channel(std::move(ch)), rho(std::move(r)) {
  if (H1.dim() != H2.dim() || H1.dim() != channel.dim() || H1.dim() != rho.dim())
    throw DimensionMismatch("work protocol: H1, H2, channel and rho sizes differ");
}

OutcomePairTable work_table(const WorkProtocol& w) { return kdq(w.rho, w.H1, w.channel, w.H2, Ordering::KDQ1); }

AtomDistribution work_distribution(const WorkProtocol& w) { return distribution(work_table(w)); }

double free_energy_difference(const Observable& H1, const Observable& H2, double beta) {
  if (beta == 0.0) {
    if (H1.dim() != H2.dim()) throw InvalidArgument("free energy difference diverges at beta = 0 for unequal dimensions");
    return 0.0;
  }
  return -(log_partition(H2, beta) - log_partition(H1, beta)) / beta;
}

JarzynskiTpm jarzynski_tpm(const WorkProtocol& w, double beta) {
  const auto t = work_table(w);
  JarzynskiTpm r{};
  r.lhs = 0.0;
  for (Eigen::Index i = 0; i < t.p_tpm.rows(); ++i)
    for (Eigen::Index f = 0; f < t.p_tpm.cols(); ++f)
      r.lhs += t.p_tpm(i, f) * std::exp(-beta * (t.outcomes2[f] - t.outcomes1[i]));
  r.rhs = std::exp(log_partition(w.H2, beta) - log_partition(w.H1, beta));
  const ComplexMatrix inv1 = inverse_thermal(w.H1, beta);
  const ComplexMatrix th2 = w.channel.heisenberg(gibbs_state(w.H2, beta).matrix());
  const ComplexMatrix d1 = dephase(w.rho, w.H1).matrix();
  r.gamma = trace_product(inv1 * d1, th2).real();
  return r;
}

JarzynskiKdq jarzynski_kdq(const WorkProtocol& w, double beta) {
  JarzynskiKdq r{};
  r.lhs = characteristic(work_distribution(w), cplx(0.0, beta));
  r.rhs = std::exp(log_partition(w.H2, beta) - log_partition(w.H1, beta));
  const ComplexMatrix inv1 = inverse_thermal(w.H1, beta);
  const ComplexMatrix th2 = w.channel.heisenberg(gibbs_state(w.H2, beta).matrix());
  r.Gamma = trace_product(inv1 * w.rho.matrix(), th2);
  return r;
}

double average_work(const WorkProtocol& w) { return moments(work_distribution(w), 1).real(); }

double average_work_tpm(const WorkProtocol& w) {
  const RealMatrix p = tpm_joint(w.rho, w.H1, w.channel, w.H2);
  const auto e1 = w.H1.values(), e2 = w.H2.values();
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index f = 0; f < p.cols(); ++f) s += p(i, f) * (e2[f] - e1[i]);
  return s;
}

double extractable_work(const WorkProtocol& w) { return -average_work(w); }

ExtractionBoundReport classical_bound(const WorkProtocol& w) {
  const auto t = work_table(w);
  const auto e1 = t.outcomes1, e2 = t.outcomes2;
  std::vector<double> pf(e2.size());
  for (std::size_t f = 0; f < e2.size(); ++f)
    pf[f] = expect(w.channel.heisenberg(w.H2.projector(f)), w.rho).real();

  ExtractionBoundReport r{};
  r.activities = RealMatrix::Zero(e1.size(), e2.size());
  r.classical_bound = 0.0;
  r.avg_work_kdq = 0.0;
  r.avg_work_tpm = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i)
    for (std::size_t f = 0; f < e2.size(); ++f) {
      const double pif = std::max(t.p_tpm(i, f), 0.0);
      const double root = std::sqrt(pif * std::max(pf[f], 0.0));
      if (e1[i] >= e2[f]) r.classical_bound += (e1[i] - e2[f]) * root;
      if (root > 1e-12) r.activities(i, f) = t.q(i, f).real() / root;
      r.avg_work_kdq += t.q(i, f).real() * (e2[f] - e1[i]);
      r.avg_work_tpm += t.p_tpm(i, f) * (e2[f] - e1[i]);
    }
  r.extractable_work = -r.avg_work_kdq;
  r.violation = r.extractable_work > r.classical_bound + 1e-10;

  const double purity = trace_product(w.rho.matrix(), w.rho.matrix()).real();
  bool degenerate = false;
  for (const auto& b : w.H1.spectrum().branches) degenerate |= b.rank > 1;
  for (const auto& b : w.H2.spectrum().branches) degenerate |= b.rank > 1;
  r.rank_deficient = purity < 1.0 - 1e-10 || degenerate;
  return r;
}

WorkVariance work_variance(const WorkProtocol& w) {
  const ComplexMatrix& H1 = w.H1.matrix();
  const ComplexMatrix H2h = w.channel.heisenberg(w.H2.matrix());
  const ComplexMatrix H2sq_h = w.channel.heisenberg(w.H2.matrix() * w.H2.matrix());

  const auto dist = work_distribution(w);
  const cplx m1 = moments(dist, 1), m2 = moments(dist, 2);

  WorkVariance r{};
  r.variance = m2 - m1 * m1;
  r.re = r.variance.real();
  r.im = r.variance.imag();
  const double e1 = expect(H1, w.rho).real();
  const double e2 = expect(H2h, w.rho).real();
  r.var_h1 = expect(H1 * H1, w.rho).real() - e1 * e1;
  r.var_h2h = expect(H2sq_h, w.rho).real() - e2 * e2;
  r.cov = 0.5 * expect(anticommutator(H1, H2h), w.rho).real() - e1 * e2;
  const double var_op = std::max(expect(H2h * H2h, w.rho).real() - e2 * e2, 0.0);
  r.robertson_bound = 2.0 * std::sqrt(std::max(r.var_h1, 0.0) * var_op);
  return r;
}

HeatExchangeSpec make_heat_spec(const Observable& Hc, const Observable& Hh, double beta_c, double beta_h,
                                const DensityOperator& rho, const ComplexMatrix& U, bool check_marginals) {
  const int dc = Hc.dim(), dh = Hh.dim();
  if (rho.dim() != dc * dh || U.rows() != dc * dh || U.cols() != dc * dh)
    throw DimensionMismatch("heat exchange: rho and U must act on Hc (x) Hh");
  QuantumChannel::unitary(U);  // unitarity check
  const ComplexMatrix Htot = kron(Hc.matrix(), identity(dh)) + kron(identity(dc), Hh.matrix());
  const double comm = commutator(Htot, U).norm();
  if (comm >= tol::energy_preserving) {
    std::ostringstream os;
    os << "||[Hc + Hh, U]|| = " << comm;
    throw NotEnergyPreserving(os.str());
  }
  if (check_marginals) {
    const double rc = (partial_trace_second(rho.matrix(), dc, dh) - gibbs_state(Hc, beta_c).matrix()).cwiseAbs().maxCoeff();
    const double rh = (partial_trace_first(rho.matrix(), dc, dh) - gibbs_state(Hh, beta_h).matrix()).cwiseAbs().maxCoeff();
    if (rc > tol::local_thermal || rh > tol::local_thermal) {
      std::ostringstream os;
      os << "reduced states differ from local Gibbs states by " << rc << " (cold), " << rh << " (hot)";
      throw NotLocallyThermal(os.str());
    }
  }
  return HeatExchangeSpec{Hc, Hh, beta_c, beta_h, rho, U, rho.min_eigenvalue()};
}

HeatTable heat_table(const HeatExchangeSpec& s) {
  const auto& bc = s.Hc.spectrum().branches;
  const auto& bh = s.Hh.spectrum().branches;
  HeatTable t;
  t.Ec = s.Hc.values();
  t.Eh = s.Hh.values();
  const std::size_t nc = bc.size(), nh = bh.size();
  std::vector<ComplexMatrix> joint, jointH;
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t h = 0; h < nh; ++h) {
      joint.push_back(kron(bc[c].projector, bh[h].projector));
      jointH.push_back(s.U.adjoint() * joint.back() * s.U);
    }
  t.q.assign(nc * nh * nc * nh, 0.0);
  t.p_tpm.assign(nc * nh * nc * nh, 0.0);
  for (std::size_t i = 0; i < nc * nh; ++i) {
    const ComplexMatrix pr = joint[i] * s.rho.matrix();
    const ComplexMatrix prp = pr * joint[i];
    for (std::size_t f = 0; f < nc * nh; ++f) {
      t.q[i * nc * nh + f] = trace_product(jointH[f], pr);
      t.p_tpm[i * nc * nh + f] = trace_product(jointH[f], prp).real();
    }
  }
  return t;
}

double average_heat(const HeatExchangeSpec& s) {
  const ComplexMatrix Hc = kron(s.Hc.matrix(), identity(s.Hh.dim()));
  const ComplexMatrix diff = s.rho.matrix() - s.U * s.rho.matrix() * s.U.adjoint();
  return trace_product(diff, Hc).real();
}

double average_heat(const HeatTable& t) {
  cplx s = 0.0;
  for (std::size_t ic = 0; ic < t.nc(); ++ic)
    for (std::size_t ih = 0; ih < t.nh(); ++ih)
      for (std::size_t fc = 0; fc < t.nc(); ++fc)
        for (std::size_t fh = 0; fh < t.nh(); ++fh) s += t.q[t.index(ic, ih, fc, fh)] * (t.Ec[ic] - t.Ec[fc]);
  return s.real();
}

bool strong_backflow(const HeatExchangeSpec& s, double avg_heat) {
  const double db = s.beta_c - s.beta_h;
  if (db <= 0.0) return false;
  return avg_heat > std::log(static_cast<double>(s.Hc.dim())) / db;
}

ExchangeRelation exchange_fluctuation(const HeatExchangeSpec& s, double support_tol) {
  const auto t = heat_table(s);
  const std::size_t nc = t.nc(), nh = t.nh();
  const auto& bc = s.Hc.spectrum().branches;
  const auto& bh = s.Hh.spectrum().branches;
  const DensityOperator gc = gibbs_state(s.Hc, s.beta_c), gh = gibbs_state(s.Hh, s.beta_h);

  std::vector<double> P(nc * nh), G(nc * nh);
  std::vector<ComplexMatrix> jointH(nc * nh);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t h = 0; h < nh; ++h) {
      const ComplexMatrix pj = kron(bc[c].projector, bh[h].projector);
      P[c * nh + h] = trace_product(pj, s.rho.matrix()).real();
      G[c * nh + h] = trace_product(bc[c].projector, gc.matrix()).real() * trace_product(bh[h].projector, gh.matrix()).real();
      jointH[c * nh + h] = s.U.adjoint() * pj * s.U;
      if (P[c * nh + h] <= support_tol) {
        std::ostringstream os;
        os << "tr[Pi_{" << c << h << "} rho] = " << P[c * nh + h];
        throw ZeroSupportProjector(os.str());
      }
    }

  // chi in the joint eigenbasis of Hc + Hh (local branch products)
  ComplexMatrix chi = s.rho.matrix();
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t h = 0; h < nh; ++h) {
      const ComplexMatrix pj = kron(bc[c].projector, bh[h].projector);
      chi -= pj * s.rho.matrix() * pj;
    }

  ExchangeRelation r{};
  r.delta_beta = s.beta_c - s.beta_h;
  r.lhs = 0.0;
  r.upsilon = 0.0;
  for (std::size_t ic = 0; ic < nc; ++ic)
    for (std::size_t ih = 0; ih < nh; ++ih)
      for (std::size_t fc = 0; fc < nc; ++fc)
        for (std::size_t fh = 0; fh < nh; ++fh) {
          const std::size_t i = ic * nh + ih, f = fc * nh + fh;
          const double Q = t.Ec[ic] - t.Ec[fc];
          // e^{dI} = [P(f)/G(f)] / [P(i)/G(i)]
          const double eI = (P[f] / G[f]) * (G[i] / P[i]);
          r.lhs += t.q[t.index(ic, ih, fc, fh)] * eI * std::exp(r.delta_beta * Q);
          const ComplexMatrix pi = kron(bc[ic].projector, bh[ih].projector);
          r.upsilon += trace_product(jointH[f], pi * chi) * P[f] / P[i];
        }
  return r;
}

WorkProtocol driven_qubit_preset(double Omega, double delta, double p, double c, double t) {
  const ComplexMatrix X = pauli::X(), Y = pauli::Y(), Z = pauli::Z();
  const ComplexMatrix H0 = 0.5 * (Omega * X + delta * Z);
  const ComplexMatrix U = expm_hermitian(Z, cplx(0.0, -delta * t / 2)) * expm_hermitian(X, cplx(0.0, -Omega * t / 2));
  const ComplexMatrix Ht = 0.5 * (Omega * (std::cos(delta * t) * X + std::sin(delta * t) * Y) + delta * Z);

  const double phi = std::atan2(Omega, delta);
  ComplexVector minus(2), plus(2);
  minus << -std::sin(phi / 2), std::cos(phi / 2);
  plus << std::cos(phi / 2), std::sin(phi / 2);
  const ComplexMatrix rho = p * minus * minus.adjoint() + (1 - p) * plus * plus.adjoint() +
                            c * (minus * plus.adjoint() + plus * minus.adjoint());
  return WorkProtocol(Observable(H0, "H(0)"), Observable(Ht, "H(t)"), QuantumChannel::unitary(U), DensityOperator(rho));
}

ComplexMatrix driven_qubit_analytic(double Omega, double delta, double p, double c, double t) {
  const double D2 = delta * delta + Omega * Omega, D = std::sqrt(D2);
  const double C = std::cos(Omega * t), S = std::sin(Omega * t);
  const double sh = std::sin(Omega * t / 2), ch = std::cos(Omega * t / 2);
  const cplx i = I_UNIT;
  ComplexMatrix q(2, 2);
  q(0, 0) = (p * (delta * delta + 2 * Omega * Omega) - c * delta * Omega + delta * (p * delta + c * Omega) * C +
             i * c * delta * D * S) / (2 * D2);
  q(0, 1) = delta * sh * (-i * c * ch / D + (p * delta + c * Omega) * sh / D2);
  q(1, 0) = (delta * ((1 - p) * delta - c * Omega) * (1 - C) - i * c * delta * D * S) / (2 * D2);
  q(1, 1) = ((1 - p) * (delta * delta + 2 * Omega * Omega) + c * delta * Omega +
             delta * ((1 - p) * delta - c * Omega) * C + i * c * delta * D * S) / (2 * D2);
  return q;
}

double driven_qubit_classical_bound(double Omega, double delta, double p, double c, double t) {
  const auto w = driven_qubit_preset(Omega, delta, p, c, t);
  const ComplexMatrix& U = w.channel.U();
  const double pminus = trace_product(U * w.rho.matrix() * U.adjoint(), w.H2.projector(0)).real();
  return delta * std::sqrt((1 - p) * (1 - std::cos(Omega * t)) / 2 * pminus);
}

HeatExchangeSpec two_qubit_heat_preset(double p, double eta, double xi, double theta, double beta_c, double beta_h,
                                       bool validate) {
  const double ac = 1.0 / (1.0 + std::exp(-beta_c));
  const double ah = 1.0 / (1.0 + std::exp(-beta_h));
  const double low = 1.0 - ac - ah + p;
  if (validate && (p < 0.0 || low < 0.0)) {
    std::ostringstream os;
    os << "populations p = " << p << ", 1 - alpha_c - alpha_h + p = " << low << " must be >= 0";
    throw NotPositiveSemidefinite(os.str());
  }
  const double bound_sq = (ac - p) * (ah - p);
  if (validate && (bound_sq < 0.0 || std::abs(eta) > std::sqrt(std::max(bound_sq, 0.0)) + 1e-12)) {
    std::ostringstream os;
    os << "|eta| = " << std::abs(eta) << " exceeds sqrt((1/alpha_c - p)(1/alpha_h - p)) = "
       << std::sqrt(std::max(bound_sq, 0.0));
    throw NotPositiveSemidefinite(os.str());
  }
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  rho(0, 0) = p;
  rho(1, 1) = ac - p;
  rho(2, 2) = ah - p;
  rho(3, 3) = 1 - ac - ah + p;
  rho(1, 2) = std::polar(eta, xi);
  rho(2, 1) = std::conj(rho(1, 2));
  ComplexMatrix U = ComplexMatrix::Identity(4, 4);
  U(1, 1) = std::cos(theta);
  U(1, 2) = -std::sin(theta);
  U(2, 1) = std::sin(theta);
  U(2, 2) = std::cos(theta);
  ComplexMatrix h(2, 2);
  h << -0.5, 0, 0, 0.5;
  const DensityOperator r = validate ? DensityOperator(rho) : DensityOperator::unchecked(rho);
  return make_heat_spec(Observable(h, "Hc"), Observable(h, "Hh"), beta_c, beta_h, r, U, true);
}

}  // namespace qprob
