#include "qprob/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qprob/errors.hpp"

namespace qprob {

namespace {

void require_projector(const ComplexMatrix& P, double tol, const char* what) {
  require_square(P, what);
  double herm = hermiticity_residual(P);
  double idem = (P * P - P).cwiseAbs().maxCoeff();
  if (herm > tol || idem > tol) {
    std::ostringstream os;
    os << what << ": max |P - P^H| = " << herm << ", max |P^2 - P| = " << idem;
    throw NotAProjector(os.str());
  }
}

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  for (double v : b) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

double wtpm_probability(const DensityOperator& rho, const ComplexMatrix& Pi_s1, const QuantumChannel& ch,
                        const ComplexMatrix& Pi_s2, double tol) {
  require_projector(Pi_s1, tol, "Pi_s1");
  require_projector(Pi_s2, tol, "Pi_s2");
  if (Pi_s1.rows() != rho.dim() || Pi_s2.rows() != rho.dim() || ch.dim() != rho.dim())
    throw DimensionMismatch("wtpm_probability");
  ComplexMatrix perp = ComplexMatrix::Identity(rho.dim(), rho.dim()) - Pi_s1;
  ComplexMatrix nonselective = Pi_s1 * rho.matrix() * Pi_s1 + perp * rho.matrix() * perp;
  return trace_product(ch.heisenberg(Pi_s2), nonselective).real();
}

double mhq_from_wtpm(double p_joint, double p_s2, double w) { return p_joint + 0.5 * (p_s2 - w); }

RamseyReadout ramsey_simulate(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch,
                              const Observable& O2, const std::vector<double>& u_grid) {
  const int d = rho.dim();
  if (O1.dim() != d || O2.dim() != d || ch.dim() != d) throw DimensionMismatch("ramsey_simulate");
  const ComplexMatrix Id = ComplexMatrix::Identity(d, d);
  ComplexMatrix P0 = ComplexMatrix::Zero(2, 2), P1 = ComplexMatrix::Zero(2, 2);
  P0(0, 0) = 1.0;
  P1(1, 1) = 1.0;
  const ComplexMatrix had = kron(Id, (pauli::X() + pauli::Z()) / std::numbers::sqrt2);
  const ComplexMatrix flip = kron(Id, pauli::X());
  const ComplexMatrix readX = kron(Id, pauli::X());
  const ComplexMatrix readY = kron(Id, pauli::Y());
  std::vector<ComplexMatrix> sys_ops;
  for (const auto& K : ch.kraus_ops()) sys_ops.push_back(kron(K, pauli::I()));
  const ComplexMatrix start = kron(rho.matrix(), P0);

  RamseyReadout out;
  out.samples.reserve(u_grid.size());
  for (double u : u_grid) {
    // first gate: e^{-iuO1} on |0>_A; second gate: e^{-iuO2} on |1>_A
    ComplexMatrix F1 = kron(expm_hermitian(O1.spectrum(), -I_UNIT * u), P0) + kron(Id, P1);
    ComplexMatrix F2 = kron(Id, P0) + kron(expm_hermitian(O2.spectrum(), -I_UNIT * u), P1);
    ComplexMatrix r = had * start * had.adjoint();
    r = F1 * r * F1.adjoint();
    ComplexMatrix evolved = ComplexMatrix::Zero(2 * d, 2 * d);
    for (const auto& K : sys_ops) evolved += K * r * K.adjoint();
    r = F2 * evolved * F2.adjoint();
    r = flip * r * flip.adjoint();
    out.samples.push_back({u, trace_product(r, readX).real(), trace_product(r, readY).real()});
  }
  return out;
}

std::vector<double> default_u_grid(const std::vector<double>& atom_values) {
  if (atom_values.empty()) throw InvalidArgument("no atom values");
  std::vector<double> v = atom_values;
  std::sort(v.begin(), v.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    double g = v[i] - v[i - 1];
    if (g > 0 && (gap == 0.0 || g < gap)) gap = g;
  }
  if (gap == 0.0) gap = 1.0;
  const std::size_t n = 4 * v.size();
  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = 2.0 * std::numbers::pi / gap * static_cast<double>(j) / static_cast<double>(n);
  return u;
}

Reconstruction reconstruct_distribution(const RamseyReadout& readout, const std::vector<double>& atom_values,
                                        double max_condition) {
  const auto m = static_cast<Eigen::Index>(readout.samples.size());
  const auto n = static_cast<Eigen::Index>(atom_values.size());
  if (n == 0) throw InvalidArgument("no atom values");
  if (m < n) throw InvalidArgument("u grid smaller than the number of atoms");
  ComplexMatrix A(m, n);
  ComplexVector g(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& s = readout.samples[j];
    g(j) = cplx(s.sx, s.sy);
    for (Eigen::Index a = 0; a < n; ++a) A(j, a) = std::exp(I_UNIT * s.u * atom_values[a]);
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cond = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (!(cond <= max_condition)) {
    std::ostringstream os;
    os << "condition number " << cond << " > " << max_condition;
    throw IllConditionedGrid(os.str());
  }
  ComplexVector w = svd.solve(g);
  Reconstruction r;
  r.residual = (A * w - g).norm();
  r.condition = cond;
  std::vector<Atom> atoms;
  for (Eigen::Index a = 0; a < n; ++a) atoms.push_back({atom_values[a], w(a)});
  r.dist = coalesce(std::move(atoms), 0.0);
  return r;
}

cplx detector_phase(const NdqpTable& t, double kappa_p0) {
  cplx s = 0.0;
  for (std::size_t a = 0; a < t.n1(); ++a)
    for (std::size_t b = 0; b < t.n1(); ++b)
      for (std::size_t f = 0; f < t.n2(); ++f) {
        double shift = t.outcomes2[f] - 0.5 * (t.outcomes1[a] + t.outcomes1[b]);
        s += t(a, b, f) * std::exp(I_UNIT * kappa_p0 * shift);
      }
  return s;
}

cplx detector_phase(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch, const Observable& O2,
                    double kappa_p0) {
  return detector_phase(ndqp(rho, O1, ch, O2), kappa_p0);
}

AtomDistribution ndqp_distribution(const NdqpTable& t, double rel_tol) {
  std::vector<Atom> atoms;
  for (std::size_t a = 0; a < t.n1(); ++a)
    for (std::size_t b = a; b < t.n1(); ++b)
      for (std::size_t f = 0; f < t.n2(); ++f) {
        double v = t.outcomes2[f] - 0.5 * (t.outcomes1[a] + t.outcomes1[b]);
        // q3(a,b,f) and q3(b,a,f) are complex conjugates
        double w = a == b ? t(a, a, f).real() : 2.0 * t(a, b, f).real();
        atoms.push_back({v, cplx(w, 0.0)});
      }
  return coalesce(std::move(atoms), rel_tol * std::max(max_abs(t.outcomes1, t.outcomes2), 1e-300));
}

AtomDistribution ndqp_distribution(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch,
                                   const Observable& O2, double rel_tol) {
  return ndqp_distribution(ndqp(rho, O1, ch, O2), rel_tol);
}

PositionDistribution detector_position(const NdqpTable& t, const DetectorSpec& spec, double max_tail) {
  if (!(spec.sigma > 0)) throw InvalidArgument("sigma must be positive");
  if (spec.n_points < 2) throw InvalidArgument("detector grid needs at least 2 points");
  if (!(spec.x_max > spec.x_min)) throw InvalidArgument("x_max must exceed x_min");
  const double s2 = spec.sigma * spec.sigma;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * s2);  // g(x-a) g(x-b) prefactor
  PositionDistribution out;
  out.xs.resize(spec.n_points);
  out.incoherent.assign(spec.n_points, 0.0);
  out.coherent.assign(spec.n_points, 0.0);
  for (int j = 0; j < spec.n_points; ++j)
    out.xs[j] = spec.x_min + (spec.x_max - spec.x_min) * j / (spec.n_points - 1);

  double inside = 0.0;
  const double r2s = std::sqrt(2.0) * spec.sigma;
  for (std::size_t a = 0; a < t.n1(); ++a)
    for (std::size_t b = 0; b < t.n1(); ++b)
      for (std::size_t f = 0; f < t.n2(); ++f) {
        const cplx q = t(a, b, f);
        if (q == 0.0) continue;
        const double ca = spec.kappa * (t.outcomes2[f] - t.outcomes1[a]);
        const double cb = spec.kappa * (t.outcomes2[f] - t.outcomes1[b]);
        const double mid = 0.5 * (ca + cb);
        const double overlap = std::exp(-(ca - cb) * (ca - cb) / (8.0 * s2));
        // the pair (a,b) + (b,a) is real: only Re q survives
        const double w = q.real();
        inside += w * overlap * 0.5 * (std::erf((spec.x_max - mid) / r2s) - std::erf((spec.x_min - mid) / r2s));
        auto& target = a == b ? out.incoherent : out.coherent;
        for (int j = 0; j < spec.n_points; ++j) {
          const double x = out.xs[j];
          target[j] += w * norm * std::exp(-((x - ca) * (x - ca) + (x - cb) * (x - cb)) / (4.0 * s2));
        }
      }
  out.density.resize(spec.n_points);
  for (int j = 0; j < spec.n_points; ++j) out.density[j] = out.incoherent[j] + out.coherent[j];
  out.mass_outside = 1.0 - inside;
  if (std::abs(out.mass_outside) > max_tail) {
    std::ostringstream os;
    os << "mass outside [" << spec.x_min << ", " << spec.x_max << "] is " << out.mass_outside;
    throw GridTooNarrow(os.str());
  }
  return out;
}

PositionDistribution detector_position(const DensityOperator& rho, const Observable& O1, const QuantumChannel& ch,
                                       const Observable& O2, const DetectorSpec& spec, double max_tail) {
  return detector_position(ndqp(rho, O1, ch, O2), spec, max_tail);
}

}  // namespace qprob
