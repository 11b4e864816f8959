#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "awe/config.hpp"
#include "awe/flight.hpp"
#include "awe/protocol.hpp"
#include "awe/report.hpp"
#include "awe/sim.hpp"
#include "awe/sizing.hpp"
#include "awe/telemetry.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_awe, m) {
  m.doc() = "Ground-unit sizing and kite flight simulation core";

  py::register_exception<awe::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<awe::CsvError>(m, "CsvError", PyExc_ValueError);
  py::register_exception<awe::protocol::ProtocolError>(m, "ProtocolError", PyExc_ValueError);

  py::class_<awe::WingParams>(m, "WingParams")
      .def(py::init<>())
      .def(py::init([](double area, double cl, double e, double span, double height) {
             return awe::WingParams{area, cl, e, span, height};
           }),
           py::arg("area_m2"), py::arg("lift_coeff"), py::arg("efficiency"),
           py::arg("wingspan_m"), py::arg("height_m"))
      .def_readwrite("area_m2", &awe::WingParams::area_m2)
      .def_readwrite("lift_coeff", &awe::WingParams::lift_coeff)
      .def_readwrite("efficiency", &awe::WingParams::efficiency)
      .def_readwrite("wingspan_m", &awe::WingParams::wingspan_m)
      .def_readwrite("height_m", &awe::WingParams::height_m)
      .def("validate", &awe::WingParams::validate);

  py::class_<awe::Environment>(m, "Environment")
      .def(py::init<>())
      .def(py::init([](double wind, double rho) {
             awe::Environment e;
             e.wind_speed_m_s = wind;
             e.air_density_kg_m3 = rho;
             return e;
           }),
           py::arg("wind_speed_m_s"), py::arg("air_density_kg_m3") = 1.2)
      .def_readwrite("air_density_kg_m3", &awe::Environment::air_density_kg_m3)
      .def_readwrite("wind_speed_m_s", &awe::Environment::wind_speed_m_s)
      .def_readwrite("wind_azimuth_rad", &awe::Environment::wind_azimuth_rad);

  m.def("peak_traction_force", &awe::peak_traction_force, py::arg("wing"), py::arg("env"));
  m.def("min_traction_force", &awe::min_traction_force, py::arg("peak_N"));
  m.def("force_oscillation_period",
        [](const awe::WingParams& w, const awe::Environment& e) {
          return awe::force_oscillation_period(w, e);
        },
        py::arg("wing"), py::arg("env"), "None when the period is unbounded");
  m.def("steering_force_difference", &awe::steering_force_difference, py::arg("wing"),
        py::arg("env"), py::arg("delta_m"));
  m.def("max_steering_delta", [](const awe::WingParams& w) { return awe::max_steering_delta(w).delta_m; },
        py::arg("wing"));
  m.def("max_wind_for_wing", &awe::max_wind_for_wing, py::arg("wing"),
        py::arg("air_density_kg_m3") = 1.2, py::arg("max_loading_N_m2") = 250.0);
  m.def("turn_rate", &awe::turn_rate, py::arg("wing"), py::arg("delta_m"), py::arg("speed_m_s"));

  m.def("default_config", [] { return awe::dump_config(awe::parse_config("{}")); },
        "Complete default configuration as JSON text");
  m.def("normalize_config", [](const std::string& text) { return awe::dump_config(awe::parse_config(text)); },
        py::arg("config_json"));
  m.def("design_report_json",
        [](const std::string& text) {
          return awe::format_report_json(awe::build_design_report(awe::parse_config(text).design));
        },
        py::arg("config_json") = "{}");
  m.def("simulate",
        [](const std::string& text, double duration_s) {
          const awe::AppConfig cfg = awe::parse_config(text);
          awe::SimulationResult r;
          {
            py::gil_scoped_release release;
            r = awe::run_simulation(cfg, duration_s);
          }
          return py::make_tuple(awe::summary_to_json(r.summary).dump(), awe::format_csv(r.samples));
        },
        py::arg("config_json") = "{}", py::arg("duration_s") = 60.0,
        "Returns (summary JSON, telemetry CSV)");
  m.def("validate_outbound", [](const std::string& frame) { return awe::protocol::validate_outbound(frame); },
        py::arg("frame"), "Empty string when the frame matches the schema");
  m.def("parse_inbound",
        [](const std::string& text) { return awe::protocol::serialize(awe::protocol::parse_inbound(text)); },
        py::arg("frame"), "Canonical form of a valid inbound frame; raises ProtocolError otherwise");
  m.attr("SCHEMA_VERSION") = awe::protocol::kSchemaVersion;
}
