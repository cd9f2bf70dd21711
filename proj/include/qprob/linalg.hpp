#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qprob/constants.hpp"

namespace qprob {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr cplx I_UNIT{0.0, 1.0};

struct Branch {
  double value;
  ComplexMatrix projector;
  int rank;
};

// Eigenvalue/projector pairs, eigenvalues strictly increasing, degenerate
// eigenvalues merged into one branch.
struct SpectralDecomposition {
  std::vector<Branch> branches;
  int source_dim = 0;

  std::size_t size() const { return branches.size(); }
  std::vector<double> values() const;
  ComplexMatrix reconstruct() const;
};

ComplexMatrix identity(int dim);

// max_ij |A - A^dagger|
double hermiticity_residual(const ComplexMatrix& A);
void require_square(const ComplexMatrix& A, const char* what);
void require_finite(const ComplexMatrix& A, const char* what);
void require_hermitian(const ComplexMatrix& A, double tol, const char* what);
void require_same_dim(const ComplexMatrix& A, const ComplexMatrix& B, const char* what);

SpectralDecomposition hermitian_eig(const ComplexMatrix& H, double group_tol = tol::eig_group);

// sum_b exp(c * lambda_b) Pi_b
ComplexMatrix expm_hermitian(const ComplexMatrix& H, cplx c);
ComplexMatrix expm_hermitian(const SpectralDecomposition& S, cplx c);

ComplexMatrix commutator(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix anticommutator(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix dagger(const ComplexMatrix& A);
cplx trace(const ComplexMatrix& A);
// tr(A B) without forming the product
cplx trace_product(const ComplexMatrix& A, const ComplexMatrix& B);

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
}  // namespace pauli

}  // namespace qprob
