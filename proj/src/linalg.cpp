#include "qprob/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "qprob/errors.hpp"

namespace qprob {

std::vector<double> SpectralDecomposition::values() const {
  std::vector<double> v;
  v.reserve(branches.size());
  for (const auto& b : branches) v.push_back(b.value);
  return v;
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  ComplexMatrix out = ComplexMatrix::Zero(source_dim, source_dim);
  for (const auto& b : branches) out += b.value * b.projector;
  return out;
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

double hermiticity_residual(const ComplexMatrix& A) {
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    std::ostringstream os;
    os << what << " must be square and non-empty, got " << A.rows() << "x" << A.cols();
    throw DimensionMismatch(os.str());
  }
}

void require_finite(const ComplexMatrix& A, const char* what) {
  if (!A.allFinite()) throw NonFiniteInput(std::string(what) + " has NaN or Inf entries");
}

void require_hermitian(const ComplexMatrix& A, double tol, const char* what) {
  require_square(A, what);
  require_finite(A, what);
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  double r = hermiticity_residual(A);
  if (r > tol * scale) {
    std::ostringstream os;
    os << what << ": max |A - A^H| = " << r;
    throw NonHermitianInput(os.str());
  }
}

void require_same_dim(const ComplexMatrix& A, const ComplexMatrix& B, const char* what) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    std::ostringstream os;
    os << what << ": " << A.rows() << "x" << A.cols() << " vs " << B.rows() << "x" << B.cols();
    throw DimensionMismatch(os.str());
  }
}

SpectralDecomposition hermitian_eig(const ComplexMatrix& H, double group_tol) {
  require_hermitian(H, tol::hermitian, "hermitian_eig");
  const int n = static_cast<int>(H.rows());
  ComplexMatrix Hs = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Hs);
  if (es.info() != Eigen::Success) throw NonHermitianInput("eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  const auto& V = es.eigenvectors();

  SpectralDecomposition out;
  out.source_dim = n;
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && ev(end) - ev(end - 1) <= group_tol * std::max(1.0, std::abs(ev(end)))) ++end;
    const int r = end - start;
    auto block = V.middleCols(start, r);
    Branch b;
    b.value = ev.segment(start, r).mean();
    b.projector = block * block.adjoint();
    b.rank = r;
    out.branches.push_back(std::move(b));
    start = end;
  }
  return out;
}

ComplexMatrix expm_hermitian(const SpectralDecomposition& S, cplx c) {
  ComplexMatrix out = ComplexMatrix::Zero(S.source_dim, S.source_dim);
  for (const auto& b : S.branches) out += std::exp(c * b.value) * b.projector;
  return out;
}

ComplexMatrix expm_hermitian(const ComplexMatrix& H, cplx c) {
  // no grouping: each eigenvector gets its own phase
  return expm_hermitian(hermitian_eig(H, 0.0), c);
}

ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B) {
  if (A.cols() != B.rows()) {
    std::ostringstream os;
    os << "matmul: " << A.rows() << "x" << A.cols() << " times " << B.rows() << "x" << B.cols();
    throw DimensionMismatch(os.str());
  }
  return A * B;
}

ComplexMatrix commutator(const ComplexMatrix& A, const ComplexMatrix& B) {
  require_same_dim(A, B, "commutator");
  return A * B - B * A;
}

ComplexMatrix anticommutator(const ComplexMatrix& A, const ComplexMatrix& B) {
  require_same_dim(A, B, "anticommutator");
  return A * B + B * A;
}

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& A) { return A.adjoint(); }

cplx trace(const ComplexMatrix& A) {
  require_square(A, "trace");
  return A.trace();
}

cplx trace_product(const ComplexMatrix& A, const ComplexMatrix& B) {
  if (A.cols() != B.rows() || A.rows() != B.cols()) throw DimensionMismatch("trace_product");
  return A.transpose().cwiseProduct(B).sum();
}

namespace pauli {
ComplexMatrix I() { return ComplexMatrix::Identity(2, 2); }
ComplexMatrix X() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
ComplexMatrix Y() {
  ComplexMatrix m(2, 2);
  m << 0, -I_UNIT, I_UNIT, 0;
  return m;
}
ComplexMatrix Z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

}  // namespace qprob
