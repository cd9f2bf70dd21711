#include "qprob/manybody.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qprob/errors.hpp"

namespace qprob {

OtocSpec::OtocSpec(DensityOperator r, ComplexMatrix y, Observable o, Observable h)
    : rho(std::move(r)), Y(std::move(y)), obs(std::move(o)), H(std::move(h)) {
  const int d = rho.dim();
  if (Y.rows() != d || Y.cols() != d || obs.dim() != d || H.dim() != d)
    throw DimensionMismatch("OTOC: rho, Y, observable and H sizes differ");
  const double r2 = (Y.adjoint() * Y - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (r2 > tol::unitary) {
    std::ostringstream os;
    os << "Y must be unitary, max |Y^dag Y - I| = " << r2;
    throw NotUnitary(os.str());
  }
}

ComplexMatrix heisenberg_perturbation(const OtocSpec& s, double t) {
  const ComplexMatrix U = expm_hermitian(s.H.spectrum(), cplx(0.0, -t));
  return U.adjoint() * s.Y * U;
}

cplx otoc(const OtocSpec& s, double t, double u) {
  const ComplexMatrix Yt = heisenberg_perturbation(s, t);
  const ComplexMatrix V = expm_hermitian(s.obs.spectrum(), cplx(0.0, u));
  return trace_product(s.rho.matrix(), Yt.adjoint() * V.adjoint() * Yt * V);
}

double oto_commutator(const OtocSpec& s, double t, double u) { return 1.0 - otoc(s, t, u).real(); }

double oto_commutator_direct(const OtocSpec& s, double t, double u) {
  const ComplexMatrix Yt = heisenberg_perturbation(s, t);
  const ComplexMatrix V = expm_hermitian(s.obs.spectrum(), cplx(0.0, u));
  const ComplexMatrix c = Yt * V - V * Yt;
  return 0.5 * trace_product(s.rho.matrix(), c.adjoint() * c).real();
}

OutcomePairTable otoc_kdq(const OtocSpec& s, double t) {
  const auto ch = QuantumChannel::unitary(heisenberg_perturbation(s, t), 1e-9);
  return kdq(s.rho, s.obs, ch, s.obs, Ordering::KDQ1);
}

cplx otoc_characteristic(const OutcomePairTable& q, double u) {
  cplx g = 0.0;
  for (std::size_t m = 0; m < q.outcomes1.size(); ++m)
    for (std::size_t n = 0; n < q.outcomes2.size(); ++n)
      g += q.q(m, n) * std::exp(I_UNIT * u * (q.outcomes1[m] - q.outcomes2[n]));
  return g;
}

cplx otoc_characteristic(const OtocSpec& s, double t, double u) { return otoc_characteristic(otoc_kdq(s, t), u); }

OtocSpec two_qubit_otoc_preset(double B1, double B2, double J, double beta) {
  const ComplexMatrix I = pauli::I(), X = pauli::X(), Z = pauli::Z();
  const ComplexMatrix H = B1 * kron(Z, I) + B2 * kron(I, Z) + J * kron(X, X);
  Observable h(H, "H");
  return OtocSpec(gibbs_state(h, beta), kron(Z, I), Observable(kron(I, Z), "sz2"), h);
}

double two_qubit_otoc_frequency(double B1, double B2, double J) { return 2.0 * std::hypot(B1 + B2, J); }

LoschmidtSpec::LoschmidtSpec(DensityOperator r, Observable h0, Observable hd)
    : rho(std::move(r)), H0(std::move(h0)), Hdelta(std::move(hd)) {
  if (rho.dim() != H0.dim() || rho.dim() != Hdelta.dim()) throw DimensionMismatch("Loschmidt: sizes differ");
}

cplx loschmidt_amplitude(const LoschmidtSpec& s, double t) {
  const ComplexMatrix a = expm_hermitian(s.H0.spectrum(), cplx(0.0, t));
  const ComplexMatrix b = expm_hermitian(s.Hdelta.spectrum(), cplx(0.0, -t));
  return trace_product(s.rho.matrix(), a * b);
}

OutcomePairTable loschmidt_kdq(const LoschmidtSpec& s) {
  return kdq(s.rho, s.H0, QuantumChannel::identity(s.rho.dim()), s.Hdelta, Ordering::KDQ2);
}

cplx loschmidt_from_table(const OutcomePairTable& q, double t) {
  cplx g = 0.0;
  for (std::size_t n = 0; n < q.outcomes1.size(); ++n)
    for (std::size_t m = 0; m < q.outcomes2.size(); ++m)
      g += std::exp(-I_UNIT * (q.outcomes2[m] - q.outcomes1[n]) * t) * q.q(n, m);
  return g;
}

AtomDistribution loschmidt_distribution(const LoschmidtSpec& s) { return distribution(loschmidt_kdq(s)); }

LoschmidtSpec qubit_loschmidt_preset(double B, double delta) {
  ComplexVector psi(2);
  psi << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  const ComplexMatrix H0 = B * pauli::Z();
  return LoschmidtSpec(DensityOperator::pure(psi), Observable(H0, "H0"), Observable(H0 + delta * pauli::X(), "Hdelta"));
}

}  // namespace qprob
