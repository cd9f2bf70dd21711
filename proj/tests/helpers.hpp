#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "qprob/qprob.hpp"

namespace testutil {

using qprob::ComplexMatrix;
using qprob::ComplexVector;
using qprob::cplx;

inline ComplexMatrix random_complex(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, int d) {
  ComplexMatrix a = random_complex(rng, d, d);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix unit_norm(const ComplexMatrix& h) {
  return h / Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
}

// Haar-ish unitary from QR with phase fix
inline ComplexMatrix random_unitary(std::mt19937_64& rng, int d) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(rng, d, d));
  ComplexMatrix Q = qr.householderQ();
  ComplexMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) Q.col(i) *= std::polar(1.0, std::arg(R(i, i)));
  return Q;
}

inline ComplexMatrix random_density(std::mt19937_64& rng, int d) {
  ComplexMatrix a = random_complex(rng, d, d);
  ComplexMatrix r = a * a.adjoint();
  return r / r.trace();
}

// Kraus set from a random isometry d -> n*d
inline std::vector<ComplexMatrix> random_kraus(std::mt19937_64& rng, int d, int n) {
  ComplexMatrix V = random_unitary(rng, n * d).leftCols(d);
  std::vector<ComplexMatrix> ks;
  for (int a = 0; a < n; ++a) ks.push_back(V.middleRows(a * d, d));
  return ks;
}

// Hermitian with a random degenerate spectrum: integer eigenvalues in [-2, 2]
inline ComplexMatrix random_degenerate_hermitian(std::mt19937_64& rng, int d) {
  std::uniform_int_distribution<int> v(-2, 2);
  ComplexMatrix D = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) D(i, i) = v(rng);
  ComplexMatrix U = random_unitary(rng, d);
  return U * D * U.adjoint();
}

inline ComplexMatrix qubit_state(cplx rho01) {
  ComplexMatrix r(2, 2);
  r << 0.5, rho01, std::conj(rho01), 0.5;
  return r;
}

inline double maxabs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
