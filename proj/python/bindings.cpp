#include "polyloc/discrepancy.hpp"
#include "polyloc/lhv.hpp"
#include "polyloc/scanner.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace polyloc;

namespace {

py::dict result_dict(const InequalityResult& r) {
  py::dict d;
  d["i1"] = r.i1;
  d["i2"] = r.i2;
  d["s_value"] = r.s_value;
  d["violated"] = r.violated;
  return d;
}

std::vector<std::string> sign_names(const std::vector<SignFunction>& fs) {
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(f.to_string());
  return out;
}

py::dict point_dict(const PointResult& p) {
  py::dict d = result_dict(p.result);
  d["params"] = p.params;
  d["valid"] = p.valid;
  d["signs"] = sign_names(p.fs);
  return d;
}

std::vector<SignFunction> to_signs(const std::vector<std::string>& tokens) {
  std::vector<SignFunction> out;
  for (const auto& t : tokens) {
    const auto part = parse_sign_list(t);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

NetworkSpec make_spec(const std::vector<DensityMatrix>& states, const std::vector<FourOutcomePovm>& povms) {
  return {states, povms};
}

}  // namespace

PYBIND11_MODULE(_polyloc, m) {
  m.doc() = "Polygon-network correlations, sign-function inequalities and hidden-variable checks.";

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<ComplexMatrix>(), py::arg("matrix"))
      .def_property_readonly("matrix", &DensityMatrix::matrix)
      .def_property_readonly("qubits", &DensityMatrix::qubits)
      .def("purity", &DensityMatrix::purity);

  m.def("bell_state", [](const std::string& which) { return bell_state(parse_bell_kind(which)); },
        py::arg("which") = "phi+");
  m.def("schmidt_state", [](double tau1, double tau2) { return make_state(state::Schmidt{tau1, tau2}); });
  m.def("separable_cc", [] { return make_state(state::SeparableCc{}); });
  m.def("product_state", [](const Vec3& u, const Vec3& v) { return make_state(state::Product{u, v}); });
  m.def("bell_diagonal_state",
        [](const std::array<double, 4>& w) { return make_state(state::BellDiagonal{w}); },
        "weights of psi-, phi+, phi-, psi+");
  m.def("noisy_gate_state", &noisy_gate_state, py::arg("p1"), py::arg("p2"));
  m.def("depolarize_bell", &depolarize_bell, py::arg("p3"));
  m.def("chsh_quantity", &chsh_quantity);
  m.def("chsh_local", &chsh_local);
  m.def("correlation_singular_values", [](const DensityMatrix& rho) {
    const SingularTriple t = correlation_singular_values(rho);
    return std::array<double, 3>{t.t11, t.t22, t.t33};
  });

  py::class_<FourOutcomePovm>(m, "FourOutcomePovm")
      .def("element", &FourOutcomePovm::element, py::arg("outcome"));
  m.def("entangled_basis", &entangled_basis, py::arg("alpha1"));
  m.def("entangled_basis_from_alpha2", &entangled_basis_from_alpha2, py::arg("alpha2"));
  m.def("product_basis", &product_basis);
  m.def("two_param_basis", &two_param_basis, py::arg("alpha2"), py::arg("alpha4"));
  m.def("inefficient_povm", &inefficient_povm, py::arg("basis"), py::arg("p4"));
  m.def("relabel_outcomes", &relabel_outcomes, py::arg("povm"), py::arg("labels"));
  m.def("label_convention", &label_convention, py::arg("name"), py::arg("n"));

  py::class_<ProbabilityTable>(m, "ProbabilityTable")
      .def(py::init<int, std::vector<double>>(), py::arg("n"), py::arg("probs"))
      .def_property_readonly("parties", &ProbabilityTable::parties)
      .def("values", [](const ProbabilityTable& p) {
        return py::array_t<double>(static_cast<py::ssize_t>(p.size()), p.values().data());
      })
      .def("marginal", &ProbabilityTable::marginal)
      .def("__len__", &ProbabilityTable::size)
      .def("__getitem__", [](const ProbabilityTable& p, std::size_t i) {
        if (i >= p.size()) throw py::index_error();
        return p[i];
      });

  m.def("joint_distribution",
        [](const std::vector<DensityMatrix>& states, const std::vector<FourOutcomePovm>& povms) {
          return joint_distribution(make_spec(states, povms));
        },
        py::arg("states"), py::arg("povms"));

  m.def("sign_table", [](const std::string& name) { return to_signs({name}).at(0).to_string(); },
        "8-character '+'/'-' table of a named sign function");
  m.def("evaluate",
        [](const ProbabilityTable& p, const std::vector<std::string>& signs, int center) {
          return result_dict(evaluate_ngon(p, to_signs(signs), center));
        },
        py::arg("table"), py::arg("signs"), py::arg("center") = 1,
        "signs: names or tables, or one dash-separated string; center is 0-based");
  m.def("search_signs",
        [](const ProbabilityTable& p, int center) {
          const SignSearchResult r = search_signs(p, center);
          py::dict d = result_dict(r.result);
          d["signs"] = sign_names(r.fs);
          d["center"] = r.center;
          return d;
        },
        py::arg("table"), py::arg("center") = 1);
  m.def("linear_nlocal_value", [](const std::vector<DensityMatrix>& s) { return linear_nlocal_value(s); });

  py::class_<NetworkTemplate>(m, "NetworkTemplate")
      .def_static("parse", &NetworkTemplate::parse, py::arg("text"))
      .def_static("load", &NetworkTemplate::load, py::arg("path"))
      .def_property_readonly("parties", &NetworkTemplate::size)
      .def_property_readonly("defaults", &NetworkTemplate::defaults)
      .def("referenced_params", &NetworkTemplate::referenced_params)
      .def("document", [](const NetworkTemplate& t) { return t.document().dump(); })
      .def("evaluate", [](const NetworkTemplate& t, const ParamMap& p) { return point_dict(evaluate_template(t, p)); },
           py::arg("params") = ParamMap{})
      .def("distribution",
           [](const NetworkTemplate& t, const ParamMap& p) { return joint_distribution(t.instantiate(p).spec); },
           py::arg("params") = ParamMap{});

  m.def("sweep",
        [](const NetworkTemplate& t, const std::vector<std::string>& axis_text, const ParamMap& fixed) {
          std::vector<Axis> axes;
          for (const auto& a : axis_text) axes.push_back(parse_axis(a));
          std::vector<PointResult> rows;
          {
            py::gil_scoped_release release;
            rows = sweep(t, axes, fixed);
          }
          py::list out;
          for (const auto& r : rows) out.append(point_dict(r));
          return out;
        },
        py::arg("template"), py::arg("axes"), py::arg("fixed") = ParamMap{}, "axes as 'name:lo:hi:steps'");
  m.def("find_threshold", &find_threshold, py::arg("template"), py::arg("param"), py::arg("lo"), py::arg("hi"),
        py::arg("fixed") = ParamMap{}, py::arg("tol") = 1e-7);
  m.def("maximize",
        [](const std::function<double(std::vector<double>)>& f, const std::vector<double>& lo,
           const std::vector<double>& hi, int levels, int starts, std::uint64_t seed) {
          MaximizeOptions o;
          o.levels = levels;
          o.starts = starts;
          o.seed = seed;
          const MaximizeResult r =
              maximize([&](std::span<const double> x) { return f({x.begin(), x.end()}); }, lo, hi, o);
          return py::make_tuple(r.value, r.argmax);
        },
        py::arg("objective"), py::arg("lo"), py::arg("hi"), py::arg("levels") = 21, py::arg("starts") = 6,
        py::arg("seed") = 7);
  m.def("compare_linear",
        [](const NetworkTemplate& t, const ParamMap& p) {
          const LinearComparison c = compare_linear(t.instantiate(p));
          py::dict d = result_dict(c.triangle);
          d["linear_value"] = c.linear_value;
          d["triangle_only"] = c.triangle_only;
          return d;
        },
        py::arg("template"), py::arg("params") = ParamMap{});

  m.def("sample_model_distribution",
        [](int n, int max_cardinality, std::uint64_t seed) {
          return model_distribution(sample_model(n, max_cardinality, seed));
        },
        py::arg("n"), py::arg("max_cardinality"), py::arg("seed"));
  m.def("run_lhv_suite",
        [](int n, int models, int sign_draws, std::uint64_t seed) {
          LhvSuiteOptions o;
          o.n = n;
          o.models = models;
          o.sign_draws = sign_draws;
          o.seed = seed;
          LhvSuiteReport r;
          {
            py::gil_scoped_release release;
            r = run_lhv_suite(o);
          }
          py::dict d;
          d["evaluations"] = r.evaluations;
          d["max_s"] = r.max_s;
          d["violations"] = r.violations.size();
          return d;
        },
        py::arg("n") = 3, py::arg("models") = 1000, py::arg("sign_draws") = 20, py::arg("seed") = 1);

  m.def("discrepancy_targets", &discrepancy_targets);
  m.def("load_known_discrepancies", &load_known_discrepancies);
  m.def("discrepancy_report",
        [](const std::string& id, int density, const KnownDiscrepancies& known) {
          const TargetReport r = discrepancy_report(id, density, known);
          py::dict d;
          d["target"] = r.target;
          d["scale"] = r.scale;
          d["max_gap"] = r.max_gap;
          d["points"] = r.points;
          d["known"] = r.known;
          d["pass"] = r.pass;
          return d;
        },
        py::arg("target"), py::arg("density") = 21, py::arg("known") = KnownDiscrepancies{});
}
