#include <memory>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lsi/certify.hpp"
#include "lsi/converse.hpp"
#include "lsi/error.hpp"
#include "lsi/pipeline.hpp"
#include "lsi/report.hpp"

namespace py = pybind11;

namespace {

py::object as_python(const lsi::Json& j) { return py::module_::import("json").attr("loads")(lsi::dump_json(j, -1)); }

lsi::PotentialSpec make(const std::string& family, const std::map<std::string, double>& params,
                        const std::vector<double>& x0) {
  return lsi::make_potential(lsi::parse_family(family), params,
                             Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size())));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "log-Sobolev certification core";

  auto config_error = py::register_exception<lsi::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<lsi::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<lsi::CheckFailure>(m, "CheckFailure", PyExc_RuntimeError);
  (void)config_error;

  py::class_<lsi::PotentialSpec>(m, "Potential")
      .def(py::init(&make), py::arg("family"), py::arg("params") = std::map<std::string, double>{},
           py::arg("x0") = std::vector<double>{0.0})
      .def_property_readonly("dim", &lsi::PotentialSpec::dim)
      .def_property_readonly("coefficients", &lsi::PotentialSpec::coefficients)
      .def("value", [](const lsi::PotentialSpec& p, const Eigen::VectorXd& x) { return p.value(x); })
      .def("default_radius", [](const lsi::PotentialSpec& p) { return lsi::default_radius(p); });

  py::class_<lsi::Grid>(m, "Grid")
      .def(py::init(&lsi::build_grid), py::arg("dim"), py::arg("radius"), py::arg("points"),
           py::arg("node_budget") = std::numeric_limits<std::size_t>::max())
      .def_property_readonly("spacing", &lsi::Grid::spacing)
      .def_property_readonly("size", &lsi::Grid::size)
      .def("coordinates", [](const lsi::Grid& g) {
        return lsi::tabulate(g, [](const lsi::Point& x) { return x[0]; });
      });

  py::class_<lsi::SpectralDecomposition, std::shared_ptr<lsi::SpectralDecomposition>>(m, "Spectrum")
      .def(py::init([](const lsi::PotentialSpec& p, const lsi::Grid& g) {
             return std::make_shared<lsi::SpectralDecomposition>(lsi::decompose(lsi::build_generator(p, g)));
           }),
           py::arg("potential"), py::arg("grid"))
      .def_property_readonly("eigenvalues", &lsi::SpectralDecomposition::eigenvalues)
      .def_property_readonly("weights",
                             [](const lsi::SpectralDecomposition& d) { return d.measure().weights; })
      .def("mode", &lsi::SpectralDecomposition::mode, py::arg("k"))
      .def("heat_apply", &lsi::SpectralDecomposition::heat_apply, py::arg("f"), py::arg("t"))
      .def("apply_generator",
           [](const lsi::SpectralDecomposition& d, const Eigen::VectorXd& f) { return d.generator().apply(f); });

  m.def("spectral_gap", &lsi::spectral_gap, py::arg("spectrum"));
  m.def(
      "entropy", [](const lsi::SpectralDecomposition& d, const Eigen::VectorXd& g) { return lsi::entropy(d.measure(), g); },
      py::arg("spectrum"), py::arg("g"));
  m.def(
      "dirichlet_form",
      [](const lsi::SpectralDecomposition& d, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        return lsi::dirichlet_form(d.generator(), f, g);
      },
      py::arg("spectrum"), py::arg("f"), py::arg("g"));
  m.def(
      "curvature_lower_bound",
      [](const lsi::PotentialSpec& p, double radius) { return as_python(lsi::to_json(lsi::curvature_lower_bound(p, radius))); },
      py::arg("potential"), py::arg("radius"));

  m.def(
      "certify",
      [](const lsi::PotentialSpec& p, const lsi::SpectralDecomposition& d, std::optional<double> K_override) {
        lsi::CertifyOptions opts;
        opts.K_override = K_override;
        lsi::CertifyReport rep;
        {
          py::gil_scoped_release release;
          rep = lsi::certify(p, d, opts);
        }
        return as_python(lsi::to_json(rep));
      },
      py::arg("potential"), py::arg("spectrum"), py::arg("K_override") = py::none());

  m.def(
      "converse",
      [](const lsi::SpectralDecomposition& d, const std::vector<double>& x0, double rho, double c) {
        const auto& gen = d.generator();
        const lsi::Point x = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
        const auto prob = lsi::schroedinger_potential(gen, x, rho, c);
        const auto result = lsi::solve_lyapunov_from_lsi(gen, prob);
        py::dict out = as_python(lsi::to_json(result));
        out["u"] = result.u;
        out["coercivity"] = as_python(lsi::to_json(lsi::coercivity_check(gen, prob, result.u)));
        return out;
      },
      py::arg("spectrum"), py::arg("x0"), py::arg("rho"), py::arg("c"));

  m.def(
      "run",
      [](const std::string& command, const std::filesystem::path& config, std::optional<std::filesystem::path> out,
         std::optional<std::uint64_t> seed) {
        auto cfg = lsi::load_config(config);
        if (out) cfg.output_dir = *out;
        if (seed) cfg.seed = *seed;
        py::gil_scoped_release release;
        return lsi::run(lsi::parse_command(command), cfg).exit_code;
      },
      py::arg("command"), py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none());
}
