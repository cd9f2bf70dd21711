#pragma once

#include "qprob/quasiprob.hpp"

namespace qprob {

// F(t) = <Y_t^dag V^dag Y_t V>, Y_t = U^dag Y U, U = e^{-iHt}, V = e^{iu obs}
struct OtocSpec {
  DensityOperator rho;
  ComplexMatrix Y;
  Observable obs;
  Observable H;

  OtocSpec(DensityOperator r, ComplexMatrix y, Observable o, Observable h);
};

ComplexMatrix heisenberg_perturbation(const OtocSpec& s, double t);  // Y_t
cplx otoc(const OtocSpec& s, double t, double u);
// 1 - Re F
double oto_commutator(const OtocSpec& s, double t, double u);
// <[Y_t, V]^dag [Y_t, V]> / 2
double oto_commutator_direct(const OtocSpec& s, double t, double u);

// q(m, n) = tr[rho Y_t^dag Pi_n Y_t Pi_m]; rows index m (initial), columns n.
OutcomePairTable otoc_kdq(const OtocSpec& s, double t);
// sum q e^{iu(o_m - o_n)}
cplx otoc_characteristic(const OtocSpec& s, double t, double u);
cplx otoc_characteristic(const OutcomePairTable& q, double u);

// H = B1 sz1 + B2 sz2 + J sx1 sx2, thermal rho, Y = sz1, obs = sz2.
OtocSpec two_qubit_otoc_preset(double B1, double B2, double J, double beta);
// 2 sqrt((B1 + B2)^2 + J^2)
double two_qubit_otoc_frequency(double B1, double B2, double J);

struct LoschmidtSpec {
  DensityOperator rho;
  Observable H0;
  Observable Hdelta;

  LoschmidtSpec(DensityOperator r, Observable h0, Observable hd);
};

// tr[rho e^{iH0 t} e^{-iHdelta t}]
cplx loschmidt_amplitude(const LoschmidtSpec& s, double t);
// q(n, m) = tr[rho Pi_n Pi^delta_m]
OutcomePairTable loschmidt_kdq(const LoschmidtSpec& s);
// sum e^{-i(E^delta_m - E_n) t} q(n, m)
cplx loschmidt_from_table(const OutcomePairTable& q, double t);
// Atoms at E^delta_m - E_n
AtomDistribution loschmidt_distribution(const LoschmidtSpec& s);

// psi = |+>, H0 = B sz, Hdelta = H0 + delta sx
LoschmidtSpec qubit_loschmidt_preset(double B, double delta);

}  // namespace qprob
