#pragma once

#include <vector>

#include "qprob/linalg.hpp"
#include "qprob/state.hpp"

namespace qprob {

enum class Ordering { KDQ1, KDQ2 };

// q(s1, s2) over the branches of O1 (rows) and O2 (columns).
struct OutcomePairTable {
  std::vector<double> outcomes1;
  std::vector<double> outcomes2;
  ComplexMatrix q;
  RealMatrix p_tpm;
  Ordering ordering = Ordering::KDQ1;

  cplx total() const { return q.sum(); }
};

struct Atom {
  double value;
  cplx weight;
};

// Atoms sorted by strictly increasing value.
struct AtomDistribution {
  std::vector<Atom> atoms;

  cplx total() const;
  std::size_t size() const { return atoms.size(); }
};

// q3(s1, s1', s2) = tr[Pi^H_{s2} Pi_{s1} rho Pi_{s1'}]
struct NdqpTable {
  std::vector<double> outcomes1;
  std::vector<double> outcomes2;
  std::vector<cplx> q3;

  std::size_t n1() const { return outcomes1.size(); }
  std::size_t n2() const { return outcomes2.size(); }
  cplx operator()(std::size_t s1, std::size_t s1p, std::size_t s2) const { return q3[(s1 * n1() + s1p) * n2() + s2]; }
  cplx& operator()(std::size_t s1, std::size_t s1p, std::size_t s2) { return q3[(s1 * n1() + s1p) * n2() + s2]; }
};

RealMatrix tpm_joint(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2);

// Fills both q and p_tpm.
OutcomePairTable kdq(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2,
                     Ordering ordering = Ordering::KDQ1);

RealMatrix mhq(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2);

NdqpTable ndqp(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2);

// -1 + sum |q|
double nonpositivity(const ComplexMatrix& q);
double nonpositivity(const OutcomePairTable& t);

// max_{s2} | sum_{s1} table(s1,s2) - tr[Pi^H_{s2} rho] |
double no_signaling_residual(const ComplexMatrix& table, const DensityOperator& rho, const QuantumChannel& ch,
                             const Observable& O2);

// Sort by value and merge atoms closer than abs_tol to the first atom of the run.
AtomDistribution coalesce(std::vector<Atom> atoms, double abs_tol);

// Atoms at o2 - o1; coalescing tolerance rel_tol * max |eigenvalue|.
AtomDistribution distribution(const OutcomePairTable& t, double rel_tol = tol::coalesce);

// tr[e^{-iu O1} rho Phi^dag(e^{iu O2})], u complex
cplx characteristic(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2,
                    cplx u);
// sum_a w_a e^{iu v_a}
cplx characteristic(const AtomDistribution& d, cplx u);

// <post|O1|psi> / <post|psi>
cplx weak_value(const Observable& O1, const ComplexVector& psi, const ComplexVector& post,
                double tol = tol::postselection);

// sum_a w_a v_a^k
cplx moments(const AtomDistribution& d, int k);

}  // namespace qprob
