#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qprob/qprob.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace qprob;

namespace {

py::dict table_dict(const OutcomePairTable& t) {
  py::dict d;
  d["outcomes1"] = t.outcomes1;
  d["outcomes2"] = t.outcomes2;
  d["q"] = t.q;
  d["p_tpm"] = t.p_tpm;
  d["ordering"] = t.ordering == Ordering::KDQ1 ? "KDQ1" : "KDQ2";
  return d;
}

py::dict dist_dict(const AtomDistribution& a) {
  std::vector<double> values;
  std::vector<cplx> weights;
  for (const auto& x : a.atoms) {
    values.push_back(x.value);
    weights.push_back(x.weight);
  }
  py::dict d;
  d["values"] = values;
  d["weights"] = weights;
  return d;
}

Ordering ordering_from(const std::string& s) {
  if (s == "KDQ1") return Ordering::KDQ1;
  if (s == "KDQ2") return Ordering::KDQ2;
  throw InvalidArgument("ordering must be KDQ1 or KDQ2");
}

}  // namespace

PYBIND11_MODULE(_qprob, m) {
  m.doc() = "Quasiprobability statistics of two-time measurements";

  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
#define REG(Name, Base) py::register_exception<Name>(m, #Name, Base.ptr())
  REG(DimensionMismatch, domain);
  REG(NonHermitianInput, domain);
  REG(NonFiniteInput, domain);
  REG(InvalidDensity, domain);
  REG(NotPositiveSemidefinite, domain);
  REG(NotAProjector, domain);
  REG(NotUnitary, domain);
  REG(NotTracePreserving, domain);
  REG(NotEnergyPreserving, domain);
  REG(NotLocallyThermal, domain);
  REG(OrthogonalPostselection, domain);
  REG(ZeroSupportProjector, domain);
  REG(UndefinedAngle, domain);
  REG(InvalidArgument, domain);
  REG(IllConditionedGrid, numerical);
  REG(GridTooNarrow, numerical);
  REG(SingularThermalState, numerical);
  REG(AtomExplosion, numerical);
#undef REG

  // ---- states and maps ----
  py::class_<DensityOperator>(m, "DensityOperator")
      .def(py::init<const ComplexMatrix&>(), py::arg("matrix"))
      .def_static("unchecked", [](const ComplexMatrix& x) { return DensityOperator::unchecked(x); })
      .def_static("pure", &DensityOperator::pure)
      .def_property_readonly("matrix", &DensityOperator::matrix)
      .def_property_readonly("dim", &DensityOperator::dim)
      .def("min_eigenvalue", &DensityOperator::min_eigenvalue);

  py::class_<Observable>(m, "Observable")
      .def(py::init([](const ComplexMatrix& x, const std::string& label) { return Observable(x, label); }),
           py::arg("matrix"), py::arg("label") = "")
      .def_property_readonly("matrix", &Observable::matrix)
      .def_property_readonly("label", &Observable::label)
      .def_property_readonly("dim", &Observable::dim)
      .def("values", &Observable::values)
      .def("projector", &Observable::projector);

  py::class_<QuantumChannel>(m, "QuantumChannel")
      .def_static("unitary", [](const ComplexMatrix& U) { return QuantumChannel::unitary(U); })
      .def_static("kraus", [](const std::vector<ComplexMatrix>& k) { return QuantumChannel::kraus(k); })
      .def_static("identity", &QuantumChannel::identity)
      .def_property_readonly("dim", &QuantumChannel::dim)
      .def("heisenberg", &QuantumChannel::heisenberg)
      .def("schrodinger", &QuantumChannel::schrodinger);

  m.def("gibbs_state", &gibbs_state);
  m.def("dephase", &dephase);

  // ---- quasiprobabilities ----
  m.def("tpm_joint", &tpm_joint);
  m.def(
      "kdq",
      [](const DensityOperator& r, const Observable& a, const QuantumChannel& c, const Observable& b,
         const std::string& o) { return table_dict(kdq(r, a, c, b, ordering_from(o))); },
      py::arg("rho"), py::arg("O1"), py::arg("channel"), py::arg("O2"), py::arg("ordering") = "KDQ1");
  m.def("mhq", &mhq);
  m.def("ndqp", [](const DensityOperator& r, const Observable& a, const QuantumChannel& c, const Observable& b) {
    const auto t = ndqp(r, a, c, b);
    py::array_t<cplx> q({t.n1(), t.n1(), t.n2()});
    std::copy(t.q3.begin(), t.q3.end(), q.mutable_data());
    return q;
  });
  m.def("nonpositivity", py::overload_cast<const ComplexMatrix&>(&nonpositivity), "-1 + sum |q|");
  m.def(
      "distribution",
      [](const DensityOperator& r, const Observable& a, const QuantumChannel& c, const Observable& b,
         const std::string& o) { return dist_dict(distribution(kdq(r, a, c, b, ordering_from(o)))); },
      py::arg("rho"), py::arg("O1"), py::arg("channel"), py::arg("O2"), py::arg("ordering") = "KDQ1");
  m.def("characteristic", py::overload_cast<const DensityOperator&, const Observable&, const QuantumChannel&,
                                            const Observable&, cplx>(&characteristic));
  m.def("weak_value", [](const Observable& o, const ComplexVector& psi, const ComplexVector& post) {
    return weak_value(o, psi, post);
  });

  // ---- measurement schemes ----
  m.def("ramsey_simulate", [](const DensityOperator& r, const Observable& a, const QuantumChannel& c,
                              const Observable& b, const std::vector<double>& us) {
    std::vector<cplx> g;
    for (const auto& s : ramsey_simulate(r, a, c, b, us).samples) g.emplace_back(s.sx, s.sy);
    return g;
  });
  m.def("reconstruct_distribution", [](const std::vector<double>& us, const std::vector<cplx>& g,
                                       const std::vector<double>& atoms) {
    if (us.size() != g.size()) throw InvalidArgument("u grid and readout differ in length");
    RamseyReadout ro;
    for (std::size_t i = 0; i < us.size(); ++i) ro.samples.push_back({us[i], g[i].real(), g[i].imag()});
    const auto rec = reconstruct_distribution(ro, atoms);
    py::dict d = dist_dict(rec.dist);
    d["residual"] = rec.residual;
    d["condition"] = rec.condition;
    return d;
  });
  m.def("detector_phase", py::overload_cast<const DensityOperator&, const Observable&, const QuantumChannel&,
                                            const Observable&, double>(&detector_phase));
  m.def(
      "detector_position",
      [](const DensityOperator& r, const Observable& a, const QuantumChannel& c, const Observable& b, double kappa,
         double p0, double sigma, double x_min, double x_max, int n) {
        const auto pd = detector_position(r, a, c, b, DetectorSpec{kappa, p0, sigma, x_min, x_max, n});
        py::dict d;
        d["x"] = pd.xs;
        d["density"] = pd.density;
        d["incoherent"] = pd.incoherent;
        d["coherent"] = pd.coherent;
        d["mass_outside"] = pd.mass_outside;
        return d;
      },
      py::arg("rho"), py::arg("O1"), py::arg("channel"), py::arg("O2"), py::arg("kappa"), py::arg("p0"),
      py::arg("sigma"), py::arg("x_min"), py::arg("x_max"), py::arg("n_points"));

  // ---- thermodynamics ----
  py::class_<WorkProtocol>(m, "WorkProtocol")
      .def(py::init<Observable, Observable, QuantumChannel, DensityOperator>(), py::arg("H1"), py::arg("H2"),
           py::arg("channel"), py::arg("rho"));
  m.def("work_table", [](const WorkProtocol& w) { return table_dict(work_table(w)); });
  m.def("work_distribution", [](const WorkProtocol& w) { return dist_dict(work_distribution(w)); });
  m.def("average_work", &average_work);
  m.def("average_work_tpm", &average_work_tpm);
  m.def("jarzynski_tpm", [](const WorkProtocol& w, double beta) {
    const auto j = jarzynski_tpm(w, beta);
    return py::dict("lhs"_a = j.lhs, "rhs"_a = j.rhs, "gamma"_a = j.gamma);
  });
  m.def("jarzynski_kdq", [](const WorkProtocol& w, double beta) {
    const auto j = jarzynski_kdq(w, beta);
    return py::dict("lhs"_a = j.lhs, "rhs"_a = j.rhs, "Gamma"_a = j.Gamma);
  });
  m.def("classical_bound", [](const WorkProtocol& w) {
    const auto r = classical_bound(w);
    return py::dict("extractable_work"_a = r.extractable_work, "classical_bound"_a = r.classical_bound,
                    "violation"_a = r.violation, "activities"_a = r.activities);
  });
  m.def("work_variance", [](const WorkProtocol& w) {
    const auto v = work_variance(w);
    return py::dict("variance"_a = v.variance, "robertson_bound"_a = v.robertson_bound, "var_h1"_a = v.var_h1,
                    "var_h2h"_a = v.var_h2h, "cov"_a = v.cov);
  });
  m.def("driven_qubit_preset", &driven_qubit_preset, py::arg("Omega"), py::arg("delta"), py::arg("p"), py::arg("c"),
        py::arg("t"));
  m.def("driven_qubit_analytic", &driven_qubit_analytic);

  py::class_<HeatExchangeSpec>(m, "HeatExchangeSpec")
      .def_readonly("min_eigenvalue", &HeatExchangeSpec::min_eigenvalue)
      .def_readonly("U", &HeatExchangeSpec::U);
  m.def("two_qubit_heat_preset", &two_qubit_heat_preset, py::arg("p"), py::arg("eta"), py::arg("xi"),
        py::arg("theta"), py::arg("beta_c"), py::arg("beta_h"), py::arg("validate") = true);
  m.def("average_heat", py::overload_cast<const HeatExchangeSpec&>(&average_heat));
  m.def("exchange_fluctuation", [](const HeatExchangeSpec& s) {
    const auto e = exchange_fluctuation(s);
    return py::dict("lhs"_a = e.lhs, "upsilon"_a = e.upsilon, "delta_beta"_a = e.delta_beta);
  });

  // ---- many-body ----
  py::class_<OtocSpec>(m, "OtocSpec")
      .def(py::init<DensityOperator, ComplexMatrix, Observable, Observable>(), py::arg("rho"), py::arg("Y"),
           py::arg("obs"), py::arg("H"));
  m.def("two_qubit_otoc_preset", &two_qubit_otoc_preset, py::arg("B1"), py::arg("B2"), py::arg("J"), py::arg("beta"));
  m.def("two_qubit_otoc_frequency", &two_qubit_otoc_frequency);
  m.def("otoc", &otoc);
  m.def("oto_commutator", &oto_commutator);
  m.def("otoc_kdq", [](const OtocSpec& s, double t) { return table_dict(otoc_kdq(s, t)); });
  m.def("otoc_characteristic", py::overload_cast<const OtocSpec&, double, double>(&otoc_characteristic));

  py::class_<LoschmidtSpec>(m, "LoschmidtSpec")
      .def(py::init<DensityOperator, Observable, Observable>(), py::arg("rho"), py::arg("H0"), py::arg("Hdelta"));
  m.def("qubit_loschmidt_preset", &qubit_loschmidt_preset, py::arg("B"), py::arg("delta"));
  m.def("loschmidt_amplitude", &loschmidt_amplitude);
  m.def("loschmidt_kdq", [](const LoschmidtSpec& s) { return table_dict(loschmidt_kdq(s)); });

  py::class_<IsingQuenchSpec>(m, "IsingQuenchSpec")
      .def(py::init([](int N, double l0, double l1, double beta, double p) {
             IsingQuenchSpec s{N, l0, l1, beta, p};
             s.validate();
             return s;
           }),
           py::arg("N"), py::arg("lambda0"), py::arg("lambda1"), py::arg("beta"), py::arg("p"))
      .def_readonly("N", &IsingQuenchSpec::N)
      .def_readonly("p", &IsingQuenchSpec::p);
  m.def("mode_table", [](double k, const IsingQuenchSpec& s) {
    const auto t = mode_table(k, s);
    py::list rows;
    for (const auto& e : t.entries) rows.append(py::make_tuple(e.label, e.W, e.q));
    return rows;
  });
  m.def(
      "assemble_distribution",
      [](const IsingQuenchSpec& s, std::size_t cap) {
        AssemblyOptions o;
        o.atom_cap = cap;
        return dist_dict(assemble_distribution(s, o));
      },
      py::arg("spec"), py::arg("atom_cap") = AssemblyOptions{}.atom_cap);
  m.def("moments_sweep", [](const IsingQuenchSpec& s, const std::vector<double>& ps) {
    py::list rows;
    for (const auto& r : moments_sweep(s, ps)) rows.append(py::make_tuple(r.p, r.avg_W, r.var_W));
    return rows;
  });

  m.def("set_threads", &set_threads);
  m.def("threads", &threads);
}
