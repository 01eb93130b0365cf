#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tubelab/config.hpp"
#include "tubelab/geometry.hpp"
#include "tubelab/run.hpp"

namespace py = pybind11;
using namespace tubelab;

namespace {

ExperimentConfig config_from(const std::string& text, const std::string& experiment) {
  return text.empty() ? default_config(experiment) : parse_config(text, experiment);
}

}  // namespace

PYBIND11_MODULE(_tubelab, m) {
  m.attr("__version__") = kToolVersion;
  m.attr("schema_version") = kSchemaVersion;

  static py::exception<Error> error(m, "TubelabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("experiment_kinds", &experiment_kinds);

  m.def(
      "canonical_config",
      [](const std::string& text, const std::string& experiment) {
        return serialize(config_from(text, experiment));
      },
      py::arg("text") = "", py::arg("experiment") = "");

  m.def(
      "config_violations",
      [](const std::string& text, const std::string& experiment) {
        try {
          parse_config(text, experiment);
        } catch (const ConfigError& e) {
          return e.violations();
        }
        return std::vector<std::string>{};
      },
      py::arg("text"), py::arg("experiment") = "");

  m.def(
      "experiment_id",
      [](const std::string& text, const std::string& experiment) {
        return experiment_id(config_from(text, experiment));
      },
      py::arg("text") = "", py::arg("experiment") = "");

  m.def("sha256_hex", &sha256_hex);

  m.def(
      "run",
      [](const std::string& text, const std::string& experiment, const std::string& out_root, int jobs) {
        const ExperimentConfig cfg = config_from(text, experiment);
        RunManifest man;
        {
          py::gil_scoped_release release;
          man = run_experiment(cfg, {out_root, jobs});
        }
        nlohmann::json j = man.to_json();
        j["directory"] = man.directory;
        return j.dump();
      },
      py::arg("text") = "", py::arg("experiment") = "", py::arg("out_root") = "", py::arg("jobs") = 1);

  m.def("verify_manifest", &verify_manifest, py::arg("run_dir"));

  m.def(
      "section_modes",
      [](const std::string& shape, double a, double b, int resolution) {
        CrossSectionSpec spec;
        switch (shape_from_string(shape)) {
          case ShapeKind::disk: spec = CrossSectionSpec::disk(a, resolution); break;
          case ShapeKind::ellipse: spec = CrossSectionSpec::ellipse(a, b, resolution); break;
          case ShapeKind::rectangle: spec = CrossSectionSpec::rectangle(a, b, resolution); break;
          case ShapeKind::polygon: fail("shape-invalid", "polygons need vertices; use a config file");
        }
        const SectionSolution s = solve_section(spec);
        py::dict d;
        d["lambda0"] = s.modes.lambda0;
        d["lambda1"] = s.modes.lambda1;
        d["C_S"] = s.modes.C_S;
        d["orthogonality_residual"] = s.modes.orthogonality_residual;
        d["nodes"] = s.mesh.size();
        return d;
      },
      py::arg("shape"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("resolution") = 32);
}
