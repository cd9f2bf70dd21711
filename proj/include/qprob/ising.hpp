#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qprob/quasiprob.hpp"

namespace qprob {

struct IsingQuenchSpec {
  int N;
  double lambda0;
  double lambda1;
  double beta;
  double p;  // weight of the coherent Gibbs state

  void validate() const;
};

struct ModeTransition {
  std::string label;  // "mn,m'n'": occupations of (k, -k) before and after
  double W;
  double q;
};

struct ModeTransitionTable {
  double k;
  double eps0;
  double eps1;
  double delta_k;
  double Zk;
  bool unpaired;  // sin k = 0: a single mode with two rows
  std::vector<ModeTransition> entries;
  double excluded = 0.0;  // oracle only: sum |q| over transitions outside the table

  double total() const;
};

// 2 sqrt(sin^2 k + (lambda - cos k)^2)
double dispersion(double k, double lambda);
// atan2(sin k, lambda - cos k)
double bogoliubov_angle(double k, double lambda);
double angle_difference(double k, double lambda0, double lambda1);

std::vector<double> quasimomenta(int N);

ModeTransitionTable mode_table(double k, const IsingQuenchSpec& s);
// Dense two-mode construction from fermionic operators, KDQ via quasiprob::kdq.
ModeTransitionTable mode_oracle(double k, const IsingQuenchSpec& s);

struct AssemblyOptions {
  std::size_t atom_cap = 10'000'000;
  double coalesce_rel = tol::coalesce;
};

AtomDistribution assemble_distribution(const IsingQuenchSpec& s, const AssemblyOptions& opt = {});

struct MomentsRow {
  double p;
  double avg_W;
  double var_W;
};

// Per-mode cumulants summed (mean and variance add under convolution).
std::vector<MomentsRow> moments_sweep(const IsingQuenchSpec& s, const std::vector<double>& p_values);

}  // namespace qprob
