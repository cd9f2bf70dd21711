#pragma once

#include <vector>

#include "qprob/quasiprob.hpp"

namespace qprob {

// Work W = E_f - E_i (done on the system).
struct WorkProtocol {
  Observable H1;
  Observable H2;
  QuantumChannel channel;
  DensityOperator rho;

  WorkProtocol(Observable h1, Observable h2, QuantumChannel ch, DensityOperator r);
};

OutcomePairTable work_table(const WorkProtocol& w);
AtomDistribution work_distribution(const WorkProtocol& w);

// -ln(Z2/Z1)/beta; zero at beta = 0 for equal dimensions
double free_energy_difference(const Observable& H1, const Observable& H2, double beta);

// lhs = <e^{-beta W}>_TPM, rhs = e^{-beta dF}; lhs = rhs * gamma
struct JarzynskiTpm {
  double lhs;
  double rhs;
  double gamma;
};
JarzynskiTpm jarzynski_tpm(const WorkProtocol& w, double beta);

// lhs = <e^{-beta W}>_KDQ = rhs * Gamma
struct JarzynskiKdq {
  cplx lhs;
  cplx Gamma;
  double rhs;
};
JarzynskiKdq jarzynski_kdq(const WorkProtocol& w, double beta);

double average_work(const WorkProtocol& w);
double average_work_tpm(const WorkProtocol& w);
double extractable_work(const WorkProtocol& w);

struct ExtractionBoundReport {
  double avg_work_kdq;
  double avg_work_tpm;
  double extractable_work;
  double classical_bound;
  RealMatrix activities;  // Re q_if / sqrt(p_if p_f), 0 where undefined
  bool violation;         // extractable_work > classical_bound + 1e-10
  bool rank_deficient;    // mixed rho or degenerate branches: activities not a decomposition
};
ExtractionBoundReport classical_bound(const WorkProtocol& w);

struct WorkVariance {
  cplx variance;
  double re;
  double im;
  double robertson_bound;  // 2 dH1 dH2^H
  double var_h1;
  double var_h2h;  // <Phi^dag(H2^2)> - <Phi^dag(H2)>^2
  double cov;      // <{H1, H2^H}>/2 - <H1><H2^H>
};
WorkVariance work_variance(const WorkProtocol& w);

// Two bodies, cold first: joint space Hc (x) Hh. Q = E_ic - E_fc.
struct HeatExchangeSpec {
  Observable Hc;
  Observable Hh;
  double beta_c;
  double beta_h;
  DensityOperator rho;
  ComplexMatrix U;
  double min_eigenvalue;  // of rho; negative only for unchecked states
};

// Validates unitarity, energy preservation and (optionally) local Gibbs marginals.
HeatExchangeSpec make_heat_spec(const Observable& Hc, const Observable& Hh, double beta_c, double beta_h,
                                const DensityOperator& rho, const ComplexMatrix& U, bool check_marginals = true);

struct HeatTable {
  std::vector<double> Ec;
  std::vector<double> Eh;
  std::vector<cplx> q;
  std::vector<double> p_tpm;

  std::size_t nc() const { return Ec.size(); }
  std::size_t nh() const { return Eh.size(); }
  std::size_t index(std::size_t ic, std::size_t ih, std::size_t fc, std::size_t fh) const {
    return ((ic * nh() + ih) * nc() + fc) * nh() + fh;
  }
};

HeatTable heat_table(const HeatExchangeSpec& s);
// tr[(rho - U rho U^dag) Hc]; positive means cold-to-hot backflow
double average_heat(const HeatExchangeSpec& s);
double average_heat(const HeatTable& t);
// <Q> > ln(d)/(beta_c - beta_h)
bool strong_backflow(const HeatExchangeSpec& s, double avg_heat);

struct ExchangeRelation {
  cplx lhs;
  cplx upsilon;
  double delta_beta;
};
ExchangeRelation exchange_fluctuation(const HeatExchangeSpec& s, double support_tol = tol::support);

// Driven qubit: H(0) = (Omega sx + delta sz)/2, U = e^{-i delta sz t/2} e^{-i Omega sx t/2},
// H(t) = U H(0) U^dag. rho = [[p, c], [c, 1-p]] in the H(0) basis (|->, |+>).
WorkProtocol driven_qubit_preset(double Omega, double delta, double p, double c, double t);
// Closed-form q; rows/cols ordered (-, +) like the numerical table.
ComplexMatrix driven_qubit_analytic(double Omega, double delta, double p, double c, double t);
// delta sqrt((1-p)(1-cos Omega t)/2 * tr[U rho U^dag Pi_-])
double driven_qubit_classical_bound(double Omega, double delta, double p, double c, double t);

// Cold/hot qubits with unit gap, |0> ground. Coherence eta e^{i xi} between |01> and |10>,
// U a rotation by theta in that block. validate=false skips only the positivity check.
HeatExchangeSpec two_qubit_heat_preset(double p, double eta, double xi, double theta, double beta_c, double beta_h,
                                       bool validate = true);

}  // namespace qprob
