#pragma once

#include <vector>

#include "qprob/quasiprob.hpp"

namespace qprob {

struct RamseySample {
  double u;
  double sx;
  double sy;
};

struct RamseyReadout {
  std::vector<RamseySample> samples;
};

struct Reconstruction {
  AtomDistribution dist;
  double residual;   // ||A w - G||_2
  double condition;  // sigma_max / sigma_min of A
};

struct DetectorSpec {
  double kappa;
  double p0 = 0.0;
  double sigma;
  double x_min;
  double x_max;
  int n_points;
};

struct PositionDistribution {
  std::vector<double> xs;
  std::vector<double> density;
  std::vector<double> incoherent;  // s1 == s1' terms
  std::vector<double> coherent;    // s1 != s1' terms
  double mass_outside;             // analytic mass outside [x_min, x_max]
};

double wtpm_probability(const DensityOperator& rho, const ComplexMatrix& Pi_s1, const QuantumChannel& ch,
                        const ComplexMatrix& Pi_s2, double tol = tol::projector);

// p + (p_s2 - w) / 2
double mhq_from_wtpm(double p_joint, double p_s2, double w);

// Auxiliary qubit circuit on system (x) auxiliary; sx + i sy equals the characteristic function.
RamseyReadout ramsey_simulate(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch,
                              const Observable& O2, const std::vector<double>& u_grid);

// 4 * n points on [0, 2 pi / gap), gap the smallest spacing of the atom values
std::vector<double> default_u_grid(const std::vector<double>& atom_values);

Reconstruction reconstruct_distribution(const RamseyReadout& readout, const std::vector<double>& atom_values,
                                        double max_condition = tol::max_condition);

cplx detector_phase(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2,
                    double kappa_p0);
cplx detector_phase(const NdqpTable& t, double kappa_p0);

// Atoms at o2 - (o1 + o1')/2, real weights.
AtomDistribution ndqp_distribution(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch,
                                   const Observable& O2, double rel_tol = tol::coalesce);
AtomDistribution ndqp_distribution(const NdqpTable& t, double rel_tol = tol::coalesce);

PositionDistribution detector_position(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch,
                                       const Observable& O2, const DetectorSpec& spec,
                                       double max_tail = tol::detector_tail);
PositionDistribution detector_position(const NdqpTable& t, const DetectorSpec& spec,
                                       double max_tail = tol::detector_tail);

}  // namespace qprob
