#include "awe/report.hpp"

#include <algorithm>
#include <cstdio>
#include <string_view>
#include <vector>

namespace awe {

namespace {

using oj = nlohmann::ordered_json;

oj maybe(const MaybeUnbounded& v) { return v ? oj(*v) : oj("unbounded"); }

struct Row {
  std::string name;
  std::string value;
  std::string unit;
};

std::string num(double x, const char* fmt = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

std::string num(const MaybeUnbounded& x, const char* fmt = "%.4f") {
  return x ? num(*x, fmt) : std::string("unbounded");
}

}  // namespace

const char* to_string(Severity s) { return s == Severity::Fail ? "FAIL" : "WARNING"; }

oj report_to_json(const DesignReport& r) {
  oj j;
  j["peak_force_N"] = r.peak_force_N;
  j["min_force_N"] = r.min_force_N;
  j["design_force_N"] = r.design_force_N;
  j["oscillation_period_s"] = maybe(r.oscillation_period_s);
  j["path_length_m"] = r.path_length_m;
  j["min_turn_radius_m"] = r.min_turn_radius_m;
  j["max_delta_m"] = r.max_delta_m;
  j["roll_angle_rad"] = r.roll_angle_rad;
  j["max_delta_force_N"] = r.max_delta_force_N;
  j["line_loads"] = {{"power_N", r.line_loads.power_N},
                     {"left_N", r.line_loads.left_N},
                     {"right_N", r.line_loads.right_N},
                     {"clamped", r.line_loads.clamped}};
  j["actuation"] = {{"steer_stroke_m", r.actuation.steer_stroke_m},
                    {"steer_speed_m_s", r.actuation.steer_speed_m_s},
                    {"power_stroke_min_m", r.actuation.power_stroke_min_m},
                    {"power_stroke_max_m", r.actuation.power_stroke_max_m},
                    {"power_speed_m_s", r.actuation.power_speed_m_s}};
  j["lms"] = {{"available_m", r.lms.available_m},
              {"required_m", r.lms.required_m},
              {"pass", r.lms.pass}};
  j["line"] = {{"peak_line_force_N", r.peak_line_force_N},
               {"required_mbl_N", r.line.required_mbl_N},
               {"required_diameter_m", r.line_required_diameter_m},
               {"pulley_min_diameter_m", r.line.pulley_min_diameter_m},
               {"mass_per_meter_kg", r.line.mass_per_meter_kg},
               {"total_mass_kg", r.line_total_mass_kg},
               {"pass", r.line.pass}};
  j["battery_current_A"] = r.battery_current_A;
  j["battery_runtime_h"] = maybe(r.battery_runtime_h);
  j["logger_memory_B"] = r.logger_memory_B;
  j["max_wind_m_s"] = r.max_wind_m_s;
  auto flags = oj::array();
  for (const auto& f : r.flags) {
    flags.push_back({{"code", f.code}, {"severity", to_string(f.severity)}, {"message", f.message}});
  }
  j["flags"] = flags;
  j["verdict"] = r.has_failure() ? "FAIL" : "PASS";
  return j;
}

std::string format_report_json(const DesignReport& r, int indent) {
  return report_to_json(r).dump(indent);
}

std::string format_report_text(const DesignReport& r) {
  const std::vector<Row> rows = {
      {"peak traction force", num(r.peak_force_N, "%.1f"), "N"},
      {"minimum traction force", num(r.min_force_N, "%.1f"), "N"},
      {"frame design force", num(r.design_force_N, "%.1f"), "N"},
      {"force oscillation period", num(r.oscillation_period_s, "%.3f"), "s"},
      {"figure-eight path length", num(r.path_length_m, "%.2f"), "m"},
      {"minimum turn radius", num(r.min_turn_radius_m, "%.2f"), "m"},
      {"max steering delta", num(r.max_delta_m, "%.3f"), "m"},
      {"roll angle", num(r.roll_angle_rad, "%.3f"), "rad"},
      {"max steering force difference", num(r.max_delta_force_N, "%.1f"), "N"},
      {"power line force", num(r.line_loads.power_N, "%.1f"), "N"},
      {"left line force", num(r.line_loads.left_N, "%.1f"), "N"},
      {"right line force", num(r.line_loads.right_N, "%.1f"), "N"},
      {"steering stroke (+-)", num(r.actuation.steer_stroke_m, "%.3f"), "m"},
      {"steering speed", num(r.actuation.steer_speed_m_s, "%.3f"), "m/s"},
      {"power stroke min", num(r.actuation.power_stroke_min_m, "%.3f"), "m"},
      {"power stroke max", num(r.actuation.power_stroke_max_m, "%.3f"), "m"},
      {"power speed", num(r.actuation.power_speed_m_s, "%.3f"), "m/s"},
      {"LMS available range (+-)", num(r.lms.available_m, "%.3f"),
       r.lms.pass ? "m  PASS" : "m  FAIL"},
      {"peak line force", num(r.peak_line_force_N, "%.1f"), "N"},
      {"required line MBL", num(r.line.required_mbl_N, "%.1f"), r.line.pass ? "N  PASS" : "N  FAIL"},
      {"required line diameter", num(r.line_required_diameter_m * 1e3, "%.3f"), "mm"},
      {"pulley min diameter", num(r.line.pulley_min_diameter_m, "%.3f"), "m"},
      {"line mass per metre", num(r.line.mass_per_meter_kg * 1e3, "%.3f"), "g/m"},
      {"line set mass", num(r.line_total_mass_kg, "%.3f"), "kg"},
      {"battery current", num(r.battery_current_A, "%.2f"), "A"},
      {"battery runtime", num(r.battery_runtime_h, "%.2f"), "h"},
      {"logger memory", num(r.logger_memory_B, "%.0f"), "B"},
      {"max wind for wing", num(r.max_wind_m_s, "%.3f"), "m/s"},
  };

  std::size_t name_w = 0;
  std::size_t value_w = 0;
  for (const auto& row : rows) {
    name_w = std::max(name_w, row.name.size());
    value_w = std::max(value_w, row.value.size());
  }
  std::string out;
  for (const auto& row : rows) {
    out += row.name;
    out.append(name_w - row.name.size() + 2, ' ');
    out.append(value_w - row.value.size(), ' ');
    out += row.value;
    out += ' ';
    out += row.unit;
    out += '\n';
  }
  for (const auto& f : r.flags) {
    out += std::string(to_string(f.severity)) + " " + f.code + ": " + f.message + "\n";
  }
  out += std::string("verdict: ") + (r.has_failure() ? "FAIL" : "PASS") + "\n";
  return out;
}

}  // namespace awe
