#pragma once

#include <string>
#include <vector>

#include "qprob/linalg.hpp"

namespace qprob {

// Hermitian, unit trace, eigenvalues >= -tol. Eigenvalues in [-tol, 0) are
// clipped to zero and the matrix renormalized.
class DensityOperator {
 public:
  explicit DensityOperator(const ComplexMatrix& m, double tol = tol::density);

  // Skips the positivity check (Hermiticity and trace are still enforced).
  // For formula-level evaluation of states given by closed forms.
  static DensityOperator unchecked(const ComplexMatrix& m, double tol = tol::density);

  static DensityOperator pure(const ComplexVector& psi);

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double min_eigenvalue() const;

 private:
  DensityOperator() = default;
  ComplexMatrix m_;
};

class Observable {
 public:
  explicit Observable(const ComplexMatrix& m, std::string label = "", double group_tol = tol::eig_group);

  const ComplexMatrix& matrix() const { return m_; }
  const SpectralDecomposition& spectrum() const { return spec_; }
  const std::string& label() const { return label_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  std::size_t outcomes() const { return spec_.size(); }
  std::vector<double> values() const { return spec_.values(); }
  const ComplexMatrix& projector(std::size_t b) const { return spec_.branches.at(b).projector; }

 private:
  ComplexMatrix m_;
  SpectralDecomposition spec_;
  std::string label_;
};

class QuantumChannel {
 public:
  static QuantumChannel unitary(const ComplexMatrix& U, double tol = tol::unitary);
  static QuantumChannel kraus(const std::vector<ComplexMatrix>& ops, double tol = tol::kraus);
  static QuantumChannel identity(int dim);

  bool is_unitary() const { return unitary_; }
  int dim() const { return dim_; }
  // Unitary for the unitary kind; throws otherwise.
  const ComplexMatrix& U() const;
  const std::vector<ComplexMatrix>& kraus_ops() const { return ops_; }

  ComplexMatrix heisenberg(const ComplexMatrix& A) const;   // sum K^dag A K
  ComplexMatrix schrodinger(const ComplexMatrix& X) const;  // sum K X K^dag

 private:
  QuantumChannel() = default;
  bool unitary_ = false;
  int dim_ = 0;
  std::vector<ComplexMatrix> ops_;
};

DensityOperator gibbs_state(const Observable& H, double beta);
// ln tr exp(-beta H), computed stably
double log_partition(const Observable& H, double beta);
DensityOperator dephase(const DensityOperator& rho, const Observable& O);
ComplexMatrix coherence_part(const DensityOperator& rho, const Observable& O);
ComplexMatrix heisenberg(const QuantumChannel& ch, const ComplexMatrix& A);
DensityOperator apply_channel(const QuantumChannel& ch, const DensityOperator& rho);

// Reduced states of a bipartite operator on dA x dB.
ComplexMatrix partial_trace_second(const ComplexMatrix& rho, int dA, int dB);
ComplexMatrix partial_trace_first(const ComplexMatrix& rho, int dA, int dB);

}  // namespace qprob
