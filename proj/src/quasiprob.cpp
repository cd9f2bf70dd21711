#include "qprob/quasiprob.hpp"

#include <algorithm>
#include <cmath>

#include "qprob/errors.hpp"

namespace qprob {

namespace {

void check_dims(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2) {
  if (rho.dim() != O1.dim() || rho.dim() != O2.dim() || rho.dim() != ch.dim())
    throw DimensionMismatch("rho, O1, channel and O2 must act on the same space");
}

std::vector<ComplexMatrix> heisenberg_projectors(const QuantumChannel& ch, const Observable& O2) {
  std::vector<ComplexMatrix> out;
  out.reserve(O2.outcomes());
  for (const auto& b : O2.spectrum().branches) out.push_back(ch.heisenberg(b.projector));
  return out;
}

}  // namespace

cplx AtomDistribution::total() const {
  cplx s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

RealMatrix tpm_joint(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2) {
  check_dims(rho, O1, ch, O2);
  const auto piH = heisenberg_projectors(ch, O2);
  const auto& b1 = O1.spectrum().branches;
  RealMatrix p(b1.size(), piH.size());
  for (std::size_t i = 0; i < b1.size(); ++i) {
    ComplexMatrix collapsed = b1[i].projector * rho.matrix() * b1[i].projector;
    for (std::size_t f = 0; f < piH.size(); ++f) p(i, f) = trace_product(piH[f], collapsed).real();
  }
  return p;
}

OutcomePairTable kdq(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2,
                     Ordering ordering) {
  check_dims(rho, O1, ch, O2);
  const auto piH = heisenberg_projectors(ch, O2);
  const auto& b1 = O1.spectrum().branches;
  OutcomePairTable t;
  t.outcomes1 = O1.values();
  t.outcomes2 = O2.values();
  t.ordering = ordering;
  t.q.resize(b1.size(), piH.size());
  for (std::size_t i = 0; i < b1.size(); ++i) {
    if (ordering == Ordering::KDQ1) {
      ComplexMatrix pr = b1[i].projector * rho.matrix();
      for (std::size_t f = 0; f < piH.size(); ++f) t.q(i, f) = trace_product(piH[f], pr);
    } else {
      ComplexMatrix rp = rho.matrix() * b1[i].projector;
      for (std::size_t f = 0; f < piH.size(); ++f) t.q(i, f) = trace_product(rp, piH[f]);
    }
  }
  t.p_tpm = tpm_joint(rho, O1, ch, O2);
  return t;
}

RealMatrix mhq(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2) {
  return kdq(rho, O1, ch, O2, Ordering::KDQ1).q.real();
}

NdqpTable ndqp(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2) {
  check_dims(rho, O1, ch, O2);
  const auto piH = heisenberg_projectors(ch, O2);
  const auto& b1 = O1.spectrum().branches;
  NdqpTable t;
  t.outcomes1 = O1.values();
  t.outcomes2 = O2.values();
  t.q3.assign(b1.size() * b1.size() * piH.size(), 0.0);
  for (std::size_t s = 0; s < b1.size(); ++s)
    for (std::size_t sp = 0; sp < b1.size(); ++sp) {
      ComplexMatrix m = b1[s].projector * rho.matrix() * b1[sp].projector;
      for (std::size_t f = 0; f < piH.size(); ++f) t(s, sp, f) = trace_product(piH[f], m);
    }
  return t;
}

double nonpositivity(const ComplexMatrix& q) { return -1.0 + q.cwiseAbs().sum(); }

double nonpositivity(const OutcomePairTable& t) { return nonpositivity(t.q); }

double no_signaling_residual(const ComplexMatrix& table, const DensityOperator& rho, const QuantumChannel& ch,
                             const Observable& O2) {
  if (table.cols() != static_cast<Eigen::Index>(O2.outcomes())) throw DimensionMismatch("table columns vs O2 branches");
  const auto piH = heisenberg_projectors(ch, O2);
  double worst = 0.0;
  for (std::size_t f = 0; f < piH.size(); ++f) {
    cplx marg = table.col(f).sum();
    cplx direct = trace_product(piH[f], rho.matrix());
    worst = std::max(worst, std::abs(marg - direct));
  }
  return worst;
}

AtomDistribution coalesce(std::vector<Atom> atoms, double abs_tol) {
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  AtomDistribution d;
  for (const auto& a : atoms) {
    if (!d.atoms.empty() && a.value - d.atoms.back().value <= abs_tol)
      d.atoms.back().weight += a.weight;
    else
      d.atoms.push_back(a);
  }
  return d;
}

AtomDistribution distribution(const OutcomePairTable& t, double rel_tol) {
  double scale = 0.0;
  for (double v : t.outcomes1) scale = std::max(scale, std::abs(v));
  for (double v : t.outcomes2) scale = std::max(scale, std::abs(v));
  std::vector<Atom> atoms;
  atoms.reserve(t.outcomes1.size() * t.outcomes2.size());
  for (std::size_t i = 0; i < t.outcomes1.size(); ++i)
    for (std::size_t f = 0; f < t.outcomes2.size(); ++f)
      atoms.push_back({t.outcomes2[f] - t.outcomes1[i], t.q(i, f)});
  return coalesce(std::move(atoms), rel_tol * std::max(scale, 1e-300));
}

cplx characteristic(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2,
                    cplx u) {
  check_dims(rho, O1, ch, O2);
  ComplexMatrix e1 = expm_hermitian(O1.spectrum(), -I_UNIT * u);
  ComplexMatrix e2 = ch.heisenberg(expm_hermitian(O2.spectrum(), I_UNIT * u));
  return trace_product(e1 * rho.matrix(), e2);
}

cplx characteristic(const AtomDistribution& d, cplx u) {
  cplx s = 0.0;
  for (const auto& a : d.atoms) s += a.weight * std::exp(I_UNIT * u * a.value);
  return s;
}

cplx weak_value(const Observable& O1, const ComplexVector& psi, const ComplexVector& post, double tol) {
  if (psi.size() != O1.dim() || post.size() != O1.dim()) throw DimensionMismatch("weak_value");
  cplx overlap = post.dot(psi);  // conjugates post
  if (std::abs(overlap) <= tol) throw OrthogonalPostselection("|<post|psi>| = " + std::to_string(std::abs(overlap)));
  return post.dot(O1.matrix() * psi) / overlap;
}

cplx moments(const AtomDistribution& d, int k) {
  if (k < 1) throw InvalidArgument("moment order must be >= 1");
  cplx s = 0.0;
  for (const auto& a : d.atoms) s += a.weight * std::pow(a.value, k);
  return s;
}

}  // namespace qprob
