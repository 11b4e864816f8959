#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "awe/config.hpp"
#include "awe/flight.hpp"

using namespace awe;

namespace {

const SimulationResult& default_run() {
  static const SimulationResult r = run_simulation(parse_config("{}"), 60.0);
  return r;
}

std::vector<double> azimuth_up_crossings(const std::vector<TelemetrySample>& s, double from) {
  std::vector<double> out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].t < from) continue;
    if (s[i - 1].phi < 0 && s[i].phi >= 0) {
      const double f = -s[i - 1].phi / (s[i].phi - s[i - 1].phi);
      out.push_back(s[i - 1].t + f * (s[i].t - s[i - 1].t));
    }
  }
  return out;
}

}  // namespace

TEST(Flight, DefaultRunStaysAirborne) {
  const auto& r = default_run();
  EXPECT_EQ(r.samples.size(), 3000u);
  EXPECT_EQ(r.summary.final_status, FlightStatus::Flying);
  EXPECT_FALSE(r.summary.log_budget_exhausted);
  EXPECT_EQ(r.summary.rejected_samples, 0u);
  EXPECT_DOUBLE_EQ(r.samples.front().t, 0.0);
  for (std::size_t i = 1; i < r.samples.size(); ++i) {
    ASSERT_NEAR(r.samples[i].t - r.samples[i - 1].t, 0.02, 1e-12);
  }
}

TEST(Flight, ConvergesToRepeatingEights) {
  const auto& r = default_run();
  const auto up = azimuth_up_crossings(r.samples, 20.0);
  ASSERT_GE(up.size(), 4u);
  double lo = 1e9, hi = 0;
  for (std::size_t i = 1; i < up.size(); ++i) {
    lo = std::min(lo, up[i] - up[i - 1]);
    hi = std::max(hi, up[i] - up[i - 1]);
  }
  EXPECT_LT(hi / lo, 1.05) << "eight durations " << lo << " .. " << hi;
  for (const auto& s : r.samples) {
    if (s.t >= 20.0) ASSERT_LT(std::abs(s.phi), std::numbers::pi / 4) << "t=" << s.t;
  }
}

TEST(Flight, EightCount) {
  const auto& r = default_run();
  EXPECT_GE(r.summary.eights, 8);
  EXPECT_EQ(r.summary.eights, static_cast<int>(azimuth_up_crossings(r.samples, 0.0).size()) - 1);
}

TEST(Flight, ForceEnvelope) {
  const auto& r = default_run();
  const AppConfig cfg = parse_config("{}");
  const double envelope = peak_traction_force(cfg.design.wing, cfg.design.env);
  for (const auto& s : r.samples) {
    ASSERT_LE(s.F_total, envelope * (1 + 1e-12));
    ASSERT_GE(s.F_power, 0.0);
    ASSERT_GE(s.F_left, 0.0);
    ASSERT_GE(s.F_right, 0.0);
    ASSERT_NEAR(s.F_power + s.F_left + s.F_right, s.F_total, 1e-9 * envelope);
    if (s.flags & telemetry_flags::kForceClamped) {
      ASSERT_TRUE(s.F_left == 0.0 || s.F_right == 0.0);
    }
    ASSERT_LE(std::abs(s.steer_cmd), 0.35);
    ASSERT_LE(std::abs(s.delta), 1.4 + 1e-12);
  }
}

TEST(Flight, DeterministicForSeed) {
  AppConfig cfg = parse_config(R"({"environment": {"gust": {"amplitude_fraction": 0.2}}})");
  const auto a = run_simulation(cfg, 10.0);
  const auto b = run_simulation(cfg, 10.0);
  EXPECT_EQ(format_csv(a.samples), format_csv(b.samples));
  cfg.sim.core.seed = 99;
  const auto c = run_simulation(cfg, 10.0);
  EXPECT_NE(format_csv(a.samples), format_csv(c.samples));
}

TEST(Flight, ZeroDurationLogsNothing) {
  const auto r = run_simulation(parse_config("{}"), 0.0);
  EXPECT_TRUE(r.samples.empty());
  EXPECT_EQ(r.summary.samples, 0u);
  EXPECT_EQ(r.summary.eights, 0);
}

TEST(Flight, BudgetStopsLogButNotFlight) {
  const AppConfig cfg = parse_config(R"({"sim": {"telemetry_budget_B": 13600}})");
  const auto r = run_simulation(cfg, 10.0);
  EXPECT_EQ(r.samples.size(), 100u);
  EXPECT_TRUE(r.summary.log_budget_exhausted);
}

TEST(Flight, ManualZeroInputFliesStraight) {
  AppConfig cfg = parse_config(R"({"sim": {"initial_mode": "manual",
      "initial": {"elevation_rad": 0.3, "azimuth_rad": 0.0, "heading_rad": 0.0}}})");
  Flight f(cfg);
  for (int i = 0; i < 200; ++i) f.step();
  EXPECT_DOUBLE_EQ(f.state().azimuth_rad, 0.0);
  EXPECT_GT(f.state().elevation_rad, 0.3);
  EXPECT_EQ(f.mode(), ControlMode::Manual);
}

TEST(Flight, ManualSteeringTurns) {
  AppConfig cfg = parse_config(R"({"sim": {"initial_mode": "manual"}})");
  Flight f(cfg);
  f.set_manual({-1.0, 0.0});
  for (int i = 0; i < 10; ++i) f.step();
  EXPECT_LT(f.state().heading_rad, std::numbers::pi / 2);
  for (int i = 0; i < 90; ++i) f.step();
  EXPECT_EQ(f.status(), FlightStatus::Flying);
  EXPECT_NEAR(f.actuators().steer_carriage_m, -0.35, 1e-12);
}

TEST(Flight, ControlRunsAtItsPeriod) {
  Flight f(parse_config("{}"));
  EXPECT_EQ(f.steps_per_control(), 2);
  for (int i = 0; i < 10; ++i) f.step();
  EXPECT_EQ(f.control_steps_done(), 5u);
  EXPECT_NEAR(f.time_s(), 0.1, 1e-12);
}

TEST(Flight, ResetRestoresInitialState) {
  Flight f(parse_config("{}"));
  for (int i = 0; i < 300; ++i) f.step();
  f.reset();
  EXPECT_DOUBLE_EQ(f.time_s(), 0.0);
  EXPECT_DOUBLE_EQ(f.state().elevation_rad, 0.3);
  EXPECT_EQ(f.status(), FlightStatus::Flying);
}

TEST(Flight, WindOverride) {
  Flight f(parse_config("{}"));
  f.set_wind_speed(6.0);
  EXPECT_DOUBLE_EQ(f.wind_m_s(), 6.0);
  EXPECT_TRUE(f.sample().flags & telemetry_flags::kWindAlert);
  EXPECT_THROW(f.set_wind_speed(-1.0), std::invalid_argument);
}

TEST(Summary, JsonHasCounts) {
  const auto j = summary_to_json(default_run().summary);
  EXPECT_EQ(j["samples"], 3000);
  EXPECT_GE(j["eights"].get<int>(), 8);
  EXPECT_EQ(j["final_status"], "flying");
  EXPECT_FALSE(format_summary_text(default_run().summary).empty());
}
