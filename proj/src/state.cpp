#include "qprob/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qprob/errors.hpp"

namespace qprob {

namespace {

void check_trace(const ComplexMatrix& m, double tol) {
  cplx tr = m.trace();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "trace = " << tr.real() << (tr.imag() >= 0 ? "+" : "") << tr.imag() << "i, expected 1";
    throw InvalidDensity(os.str());
  }
}

}  // namespace

DensityOperator::DensityOperator(const ComplexMatrix& m, double tol) {
  require_hermitian(m, tol, "density operator");
  check_trace(m, tol);
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() < -tol) {
    std::ostringstream os;
    os << "minimum eigenvalue " << ev.minCoeff() << " < -" << tol;
    throw NotPositiveSemidefinite(os.str());
  }
  if (ev.minCoeff() < 0.0) {
    Eigen::VectorXd clipped = ev.cwiseMax(0.0);
    clipped /= clipped.sum();
    const auto& V = es.eigenvectors();
    h = V * clipped.cast<cplx>().asDiagonal() * V.adjoint();
  }
  m_ = h;
}

DensityOperator DensityOperator::unchecked(const ComplexMatrix& m, double tol) {
  require_hermitian(m, tol, "density operator");
  check_trace(m, tol);
  DensityOperator d;
  d.m_ = 0.5 * (m + m.adjoint());
  return d;
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  double n = psi.norm();
  if (n == 0.0 || !std::isfinite(n)) throw InvalidDensity("state vector has zero or non-finite norm");
  ComplexVector v = psi / n;
  return DensityOperator(v * v.adjoint());
}

double DensityOperator::min_eigenvalue() const {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m_, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

Observable::Observable(const ComplexMatrix& m, std::string label, double group_tol)
    : m_(m), spec_(hermitian_eig(m, group_tol)), label_(std::move(label)) {}

QuantumChannel QuantumChannel::unitary(const ComplexMatrix& U, double tol) {
  require_square(U, "unitary");
  require_finite(U, "unitary");
  const int d = static_cast<int>(U.rows());
  double r = (U.adjoint() * U - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (r > tol) {
    std::ostringstream os;
    os << "max |U^dag U - I| = " << r;
    throw NotUnitary(os.str());
  }
  QuantumChannel ch;
  ch.unitary_ = true;
  ch.dim_ = d;
  ch.ops_ = {U};
  return ch;
}

QuantumChannel QuantumChannel::kraus(const std::vector<ComplexMatrix>& ops, double tol) {
  if (ops.empty()) throw InvalidArgument("empty Kraus list");
  const int d = static_cast<int>(ops.front().rows());
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& K : ops) {
    require_square(K, "Kraus operator");
    require_finite(K, "Kraus operator");
    if (K.rows() != d) throw DimensionMismatch("Kraus operators of different sizes");
    sum += K.adjoint() * K;
  }
  double r = (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (r > tol) {
    std::ostringstream os;
    os << "max |sum K^dag K - I| = " << r;
    throw NotTracePreserving(os.str());
  }
  QuantumChannel ch;
  ch.unitary_ = false;
  ch.dim_ = d;
  ch.ops_ = ops;
  return ch;
}

QuantumChannel QuantumChannel::identity(int dim) { return unitary(ComplexMatrix::Identity(dim, dim)); }

const ComplexMatrix& QuantumChannel::U() const {
  if (!unitary_) throw InvalidArgument("channel is not unitary");
  return ops_.front();
}

ComplexMatrix QuantumChannel::heisenberg(const ComplexMatrix& A) const {
  if (A.rows() != dim_ || A.cols() != dim_) throw DimensionMismatch("heisenberg: operator and channel sizes differ");
  ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& K : ops_) out += K.adjoint() * A * K;
  return out;
}

ComplexMatrix QuantumChannel::schrodinger(const ComplexMatrix& X) const {
  if (X.rows() != dim_ || X.cols() != dim_) throw DimensionMismatch("apply_channel: state and channel sizes differ");
  ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& K : ops_) out += K * X * K.adjoint();
  return out;
}

double log_partition(const Observable& H, double beta) {
  if (!std::isfinite(beta)) throw InvalidArgument("beta must be finite");
  const auto& br = H.spectrum().branches;
  double m = -1e300;
  for (const auto& b : br) m = std::max(m, -beta * b.value);
  double s = 0.0;
  for (const auto& b : br) s += b.rank * std::exp(-beta * b.value - m);
  return m + std::log(s);
}

DensityOperator gibbs_state(const Observable& H, double beta) {
  double lz = log_partition(H, beta);
  ComplexMatrix m = ComplexMatrix::Zero(H.dim(), H.dim());
  for (const auto& b : H.spectrum().branches) m += std::exp(-beta * b.value - lz) * b.projector;
  return DensityOperator(m);
}

DensityOperator dephase(const DensityOperator& rho, const Observable& O) {
  require_same_dim(rho.matrix(), O.matrix(), "dephase");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& b : O.spectrum().branches) out += b.projector * rho.matrix() * b.projector;
  return DensityOperator::unchecked(out);
}

ComplexMatrix coherence_part(const DensityOperator& rho, const Observable& O) {
  return rho.matrix() - dephase(rho, O).matrix();
}

ComplexMatrix heisenberg(const QuantumChannel& ch, const ComplexMatrix& A) { return ch.heisenberg(A); }

DensityOperator apply_channel(const QuantumChannel& ch, const DensityOperator& rho) {
  return DensityOperator(ch.schrodinger(rho.matrix()));
}

ComplexMatrix partial_trace_second(const ComplexMatrix& rho, int dA, int dB) {
  if (rho.rows() != dA * dB) throw DimensionMismatch("partial trace");
  ComplexMatrix out = ComplexMatrix::Zero(dA, dA);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      for (int k = 0; k < dB; ++k) out(i, j) += rho(i * dB + k, j * dB + k);
  return out;
}

ComplexMatrix partial_trace_first(const ComplexMatrix& rho, int dA, int dB) {
  if (rho.rows() != dA * dB) throw DimensionMismatch("partial trace");
  ComplexMatrix out = ComplexMatrix::Zero(dB, dB);
  for (int i = 0; i < dB; ++i)
    for (int j = 0; j < dB; ++j)
      for (int k = 0; k < dA; ++k) out(i, j) += rho(k * dB + i, k * dB + j);
  return out;
}

}  // namespace qprob
