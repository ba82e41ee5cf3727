#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>

#include "ouint/matkit.hpp"
#include "ouint/ou_core.hpp"
#include "ouint/simulate.hpp"
#include "ouint/stability.hpp"
#include "ouint/stationary.hpp"

namespace py = pybind11;

// numpy <-> Matrix / Vector. Matrices are copied in both directions.
namespace pybind11::detail {

template <>
struct type_caster<ouint::Matrix> {
  PYBIND11_TYPE_CASTER(ouint::Matrix, const_name("numpy.ndarray[float64[m, n]]"));

  bool load(handle src, bool convert) {
    if (!convert && !array_t<double>::check_(src)) return false;
    auto arr = array_t<double, array::c_style | array::forcecast>::ensure(src);
    if (!arr || arr.ndim() != 2) return false;
    value = ouint::Matrix::from_row_major(
        static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)),
        std::vector<double>(arr.data(), arr.data() + arr.size()));
    return true;
  }

  static handle cast(const ouint::Matrix& m, return_value_policy, handle) {
    array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out.release();
  }
};

template <>
struct type_caster<ouint::Vector> {
  PYBIND11_TYPE_CASTER(ouint::Vector, const_name("numpy.ndarray[float64[n]]"));

  bool load(handle src, bool convert) {
    if (!convert && !array_t<double>::check_(src)) return false;
    auto arr = array_t<double, array::c_style | array::forcecast>::ensure(src);
    if (!arr || arr.ndim() != 1) return false;
    const auto view = arr.template unchecked<1>();
    value = ouint::Vector(static_cast<std::size_t>(view.shape(0)));
    for (ssize_t i = 0; i < view.shape(0); ++i) value[static_cast<std::size_t>(i)] = view(i);
    return true;
  }

  static handle cast(const ouint::Vector& v, return_value_policy, handle) {
    array_t<double> out(std::vector<ssize_t>{static_cast<ssize_t>(v.size())});
    auto view = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.size(); ++i) view(static_cast<ssize_t>(i)) = v[i];
    return out.release();
  }
};

}  // namespace pybind11::detail

namespace {

py::array_t<double> bundle_array(const ouint::PathBundle& b) {
  py::array_t<double> out({b.n_paths(), b.grid().size(), b.dim()});
  std::copy(b.values().begin(), b.values().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const ouint::StabilityReport& r) {
  py::dict d;
  d["classification"] = std::string(ouint::to_string(r.classification));
  d["spectral_abscissa"] = r.spectral_abscissa;
  d["certificate"] = r.certificate ? py::cast(*r.certificate) : py::none();
  return d;
}

ouint::ClosedFormTarget target_from(const std::string& which) {
  if (which == "X2") return ouint::ClosedFormTarget::kX2;
  if (which == "X3") return ouint::ClosedFormTarget::kX3;
  throw ouint::Error(ouint::ErrorCode::kInvalidArgument, "which must be 'X2' or 'X3'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  using namespace ouint;
  m.doc() = "Interventions, stability and stationary laws of Ornstein-Uhlenbeck SDEs";

  static py::exception<Error> error_type(m, "OuintError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  // Linear algebra
  m.def("expm", &expm, py::arg("m"));
  m.def("solve_linear", py::overload_cast<const Matrix&, const Matrix&>(&solve_linear),
        py::arg("m"), py::arg("rhs"));
  m.def("cholesky", &cholesky, py::arg("m"));
  m.def(
      "rank", [](const Matrix& a, std::optional<double> tol) { return rank(a, tol); },
      py::arg("m"), py::arg("tol") = py::none());
  m.def("kron", &kron, py::arg("a"), py::arg("b"));
  m.def(
      "principal_submatrix",
      [](const Matrix& a, std::vector<std::size_t> removed) {
        return principal_submatrix(a, removed);
      },
      py::arg("m"), py::arg("removed"), "Removes the listed 0-based rows and columns.");

  // Models and interventions
  py::class_<OuModel>(m, "OuModel")
      .def(py::init<Vector, Vector, Matrix, Matrix, std::vector<std::string>>(),
           py::arg("x0"), py::arg("A"), py::arg("B"), py::arg("sigma"),
           py::arg("labels") = std::vector<std::string>{})
      .def_property_readonly("p", &OuModel::p)
      .def_property_readonly("d", &OuModel::d)
      .def_property_readonly("x0", &OuModel::x0)
      .def_property_readonly("A", &OuModel::level)
      .def_property_readonly("B", &OuModel::speed)
      .def_property_readonly("sigma", &OuModel::sigma)
      .def_property_readonly("labels", &OuModel::labels)
      .def("drift", &OuModel::drift, py::arg("x"));

  py::class_<InterventionRecord>(m, "InterventionRecord")
      .def_property_readonly("original_labels", &InterventionRecord::original_labels)
      .def_property_readonly("fixed",
                             [](const InterventionRecord& r) {
                               std::vector<std::pair<std::string, double>> out;
                               for (const auto& f : r.fixed()) out.emplace_back(f.label, f.value);
                               return out;
                             })
      .def_property_readonly("surviving", [](const InterventionRecord& r) {
        std::vector<std::size_t> out;
        for (std::size_t i : r.surviving()) out.push_back(i + 1);
        return out;
      });

  m.def(
      "intervene",
      [](const OuModel& model, std::size_t coordinate, double value) {
        auto r = intervene_ou(model, {coordinate, value});
        return py::make_tuple(r.model, r.record);
      },
      py::arg("model"), py::arg("m"), py::arg("c"),
      "Apply X^m := c (1-based m); returns (reduced model, record).");
  m.def(
      "intervene_seq",
      [](const OuModel& model, const std::vector<std::pair<std::size_t, double>>& ivs) {
        std::vector<Intervention> list;
        for (const auto& [coord, value] : ivs) list.push_back({coord, value});
        auto r = intervene_seq(model, list);
        return py::make_tuple(r.model, r.record);
      },
      py::arg("model"), py::arg("interventions"));

  py::class_<DependenceGraph>(m, "DependenceGraph")
      .def_readonly("labels", &DependenceGraph::labels)
      .def_property_readonly("edges",
                             [](const DependenceGraph& g) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (auto [from, to] : g.edges)
                                 out.emplace_back(g.labels[from], g.labels[to]);
                               return out;
                             })
      .def("to_dot", [](const DependenceGraph& g) { return to_dot(g); });
  m.def("dependence_graph", &dependence_graph, py::arg("model"), py::arg("tol") = 0.0);

  // Stability
  m.def(
      "is_stable",
      [](const Matrix& b) {
        auto c = is_stable(b);
        return py::make_tuple(c.stable, c.lyapunov ? py::cast(*c.lyapunov) : py::none());
      },
      py::arg("B"));
  m.def("spectral_abscissa", &spectral_abscissa, py::arg("B"),
        py::arg("tol") = kDefaultAbscissaTol);
  m.def(
      "classify", [](const Matrix& b, double tol) { return report_dict(classify(b, tol)); },
      py::arg("B"), py::arg("tol") = kDefaultAbscissaTol);
  m.def(
      "screen_principal_submatrices",
      [](const Matrix& b, std::size_t max_removed, std::size_t budget, double tol) {
        auto s = screen_principal_submatrices(b, max_removed, budget, tol);
        py::list entries;
        for (const auto& e : s.entries) {
          py::dict d = report_dict(e.report);
          d["removed"] = e.removed;
          entries.append(d);
        }
        py::dict out;
        out["entries"] = entries;
        out["all_proper_principal_submatrices_stable"] =
            s.all_proper_principal_submatrices_stable;
        out["used_symmetric_fast_path"] = s.used_symmetric_fast_path;
        return out;
      },
      py::arg("B"), py::arg("max_size_removed"), py::arg("budget") = kDefaultSubsetBudget,
      py::arg("tol") = kDefaultAbscissaTol);
  m.def("diagonal_lyapunov_certificate", &diagonal_lyapunov_certificate, py::arg("B"),
        py::arg("budget"), py::arg("seed"));
  m.def("verify_diagonal_certificate", &verify_diagonal_certificate, py::arg("B"),
        py::arg("D"));

  // Stationary laws
  m.def("controllability_rank", &controllability_rank, py::arg("B"), py::arg("sigma"));
  m.def(
      "stationary_exists",
      [](const OuModel& model) {
        auto v = stationary_exists(model);
        py::dict d;
        d["verdict"] = std::string(to_string(v.verdict));
        d["controllability_rank"] = v.controllability_rank;
        d["sigma_full_column_span"] = v.sigma_full_column_span;
        d["b_stable"] = v.b_stable;
        return d;
      },
      py::arg("model"));
  m.def(
      "stationary_distribution",
      [](const OuModel& model) {
        auto law = stationary_distribution(model);
        return py::make_tuple(law.mean, law.cov);
      },
      py::arg("model"), "Returns (mean, cov).");
  m.def(
      "gamma_by_quadrature",
      [](const OuModel& model, std::optional<double> horizon, std::size_t panels) {
        return horizon ? gamma_by_quadrature(model, *horizon, panels)
                       : gamma_by_quadrature(model);
      },
      py::arg("model"), py::arg("T") = py::none(), py::arg("n") = 2000);
  m.def(
      "triangular_closed_forms",
      [](const Matrix& b, const Vector& a, double c, const std::string& which) {
        auto law = triangular_closed_forms(b, a, c, target_from(which));
        return py::make_tuple(law.mean, law.cov);
      },
      py::arg("B"), py::arg("A"), py::arg("c"), py::arg("which"));

  // Simulation
  m.def(
      "exact_transition",
      [](const OuModel& model, double t) {
        auto tr = exact_transition(model, t);
        return py::make_tuple(tr.F, tr.g, tr.Q);
      },
      py::arg("model"), py::arg("t"), "Returns (F, g, Q).");
  m.def(
      "simulate_paths",
      [](const OuModel& model, std::vector<double> times, std::size_t n_paths,
         std::uint64_t seed, const std::string& method) {
        if (method != "exact" && method != "euler")
          throw Error(ErrorCode::kInvalidArgument, "method must be 'exact' or 'euler'");
        const Method mth = method == "exact" ? Method::kExact : Method::kEuler;
        PathBundle b = [&] {
          py::gil_scoped_release release;
          return simulate_paths(model, TimeGrid(std::move(times)), n_paths, seed, mth);
        }();
        return bundle_array(b);
      },
      py::arg("model"), py::arg("times"), py::arg("n_paths"), py::arg("seed"),
      py::arg("method") = "exact", "Array of shape (n_paths, len(times), p).");
  m.def(
      "coupled_intervention_diff",
      [](const OuModel& model, std::size_t coordinate, double value, std::vector<double> times,
         std::size_t n_paths, std::uint64_t seed) {
        CoupledPaths run = [&] {
          py::gil_scoped_release release;
          return coupled_intervention_diff(model, {coordinate, value},
                                           TimeGrid(std::move(times)), n_paths, seed);
        }();
        return py::make_tuple(bundle_array(run.original), bundle_array(run.difference));
      },
      py::arg("model"), py::arg("m"), py::arg("c"), py::arg("times"), py::arg("n_paths"),
      py::arg("seed"), "Returns (X, Y - X) arrays.");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
