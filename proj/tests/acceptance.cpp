// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// Usage: awe_acceptance [path-to-awe-cli]

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "awe/config.hpp"
#include "awe/flight.hpp"
#include "awe/protocol.hpp"
#include "awe/server.hpp"
#include "awe/sim.hpp"
#include "awe/sizing.hpp"
#include "awe/telemetry.hpp"
#include "oracles.hpp"
#include "ws_client.hpp"

using namespace awe;
using nlohmann::json;

namespace {

using clock_type = std::chrono::steady_clock;

int g_failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

const WingParams kWing{9.0, 0.8, 5.6, 2.7, 1.8};

Environment wind(double w) {
  Environment e;
  e.wind_speed_m_s = w;
  return e;
}

void peak_force_example() {
  const auto t0 = clock_type::now();
  const double f = peak_traction_force(kWing, wind(3.4));
  const double t_single = seconds_since(t0);
  const auto t1 = clock_type::now();
  constexpr int kReps = 200;
  DesignInputs in;
  for (int i = 0; i < kReps; ++i) {
    volatile double sink = build_design_report(in).peak_force_N;
    (void)sink;
  }
  const double t_report = seconds_since(t1) / kReps;
  const double oracle = static_cast<double>(oracle::crosswind_force(1.2L, 9, 0.8L, 5.6L, 3.4L));
  const bool ok = std::abs(f - 1641.6) <= 0.1 && rel(f, 1600.0) <= 0.05 &&
                  std::abs(f - oracle) <= 1e-9 * f && t_report < 1e-3 && t_single < 1e-3;
  report(ok, "peak-force-example",
         fmt("F=%.3f N (target 1641.6+-0.1, %.2f%% from 1600), full report %.1f us", f,
             100 * rel(f, 1600.0), t_report * 1e6));
}

void steering_force_example() {
  const double d = max_steering_delta(kWing).delta_m;
  const double df = steering_force_difference(kWing, wind(3.4), d);
  const bool ok = std::abs(df - 328.3) <= 0.1 && rel(df, 320.0) <= 0.05;
  report(ok, "steering-force-example",
         fmt("dF=%.3f N at delta=%.3f m (target 328.3+-0.1, %.2f%% from 320)", df, d,
             100 * rel(df, 320.0)));
}

void oscillation_period_example() {
  const auto t = force_oscillation_period(kWing, wind(3.4));
  const bool ok = t && std::abs(*t - 2.23) <= 0.01 && rel(*t, 2.5) <= 0.15;
  report(ok, "oscillation-period-example",
         t ? fmt("T=%.4f s (target 2.23+-0.01, %.1f%% from 2.5)", *t, 100 * rel(*t, 2.5))
           : std::string("unbounded"));
}

void lms_feasibility() {
  const LmsVerdict v = check_lms_feasibility(kWing, {4.0, 0.35});
  const DesignReport r = build_design_report({});
  const bool ok = std::abs(v.available_m - 1.4) < 1e-12 && std::abs(v.required_m - 1.35) < 1e-12 &&
                  v.pass && r.lms.pass && !r.has_failure();
  report(ok, "steering-stroke-feasibility",
         fmt("available +-%.3f m, required +-%.3f m, verdict %s", v.available_m, v.required_m,
             v.pass ? "PASS" : "FAIL"));
}

void flight_consistency() {
  const AppConfig cfg = parse_config("{}");
  const auto t0 = clock_type::now();
  const SimulationResult run = run_simulation(cfg, 60.0);
  const double elapsed = seconds_since(t0);
  const FlightSummary& s = run.summary;
  const double envelope = peak_traction_force(cfg.design.wing, cfg.design.env);

  const bool a = s.peak_force_fraction >= 0.6 && s.peak_force_fraction <= 1.0;
  const bool have_b = s.measured_period_s && s.predicted_period_s;
  const double period_err = have_b ? rel(*s.measured_period_s, *s.predicted_period_s) : 1e9;
  const bool b = have_b && period_err <= 0.2;
  const bool c = s.force_ratio >= 2.0 && s.force_ratio <= 6.0;

  const auto& core = cfg.sim.core;
  // Taut lines carry the formula's difference directly; with a slack line the
  // loaded one carries the formula's difference capped at the total.
  const double p = cfg.design.policy.power_line_fraction;
  double worst = 0.0;
  std::size_t checked = 0, slack = 0;
  for (const auto& x : run.samples) {
    const double w_eff = x.wind * std::cos(x.theta) * std::cos(x.phi) *
                         depower_multiplier(x.z, core.depower_min_multiplier,
                                            core.actuators.power_min_m);
    Environment e = cfg.design.env;
    e.wind_speed_m_s = w_eff;
    const double expected = steering_force_difference(cfg.design.wing, e, x.delta);
    double err = 0.0;
    if (x.flags & telemetry_flags::kForceClamped) {
      ++slack;
      const double loaded = std::min(std::abs(expected), x.F_total);
      const double carried = expected > 0 ? x.F_left : x.F_right;
      const double idle = expected > 0 ? x.F_right : x.F_left;
      err = std::max({std::abs(carried - loaded), std::abs(idle),
                      std::max(0.0, (1 - p) * x.F_total - std::abs(expected))});
    } else {
      err = std::abs((x.F_left - x.F_right) - expected);
    }
    worst = std::max(worst, err);
    ++checked;
  }
  const bool d = checked == run.samples.size() && checked > 0 && worst <= 1e-9 * envelope;
  const bool fast = elapsed < 5.0;
  const bool flying = s.final_status == FlightStatus::Flying;

  report(a && b && c && d && fast && flying, "flight-force-consistency",
         fmt("(a) peak %.3f F (b) period %.3f s vs %.3f s, %.1f%% (c) max/min %.3f "
             "(d) max |dF err| %.2e N over %zu samples, %.2f s wall, %d eights",
             s.peak_force_fraction, have_b ? *s.measured_period_s : 0.0,
             have_b ? *s.predicted_period_s : 0.0, 100 * period_err, s.force_ratio, worst, checked,
             elapsed, s.eights));
  std::printf("      (d) %zu samples with both steering lines taut, %zu with one slack\n",
              checked - slack, slack);
}

void turn_radius_calibration() {
  SimConfig cfg;
  const double r = 30.0;
  const double carriage = 0.15 * kWing.wingspan_m / cfg.actuators.carriage_multiplier;
  ActuatorState act;
  act.steer_carriage_m = act.steer_cmd_m = carriage;
  KiteState s;
  s.elevation_rad = 0.6;
  s.heading_rad = std::numbers::pi / 2;
  std::vector<oracle::Point3> pts;
  double turned = 0.0;
  while (turned < 2 * std::numbers::pi && pts.size() < 100000) {
    const KiteState next = step(s, act, 3.4, wind(3.4), kWing, {}, cfg).state;
    turned += std::abs(wrap_angle(next.heading_rad - s.heading_rad));
    s = next;
    pts.push_back(oracle::to_cartesian(s.elevation_rad, s.azimuth_rad, r));
  }
  const double radius = oracle::geodesic_turn_radius(oracle::fit_circle_radius(pts), r);
  const double target = 2.5 * kWing.wingspan_m;
  report(rel(radius, target) <= 0.02, "turn-radius-calibration",
         fmt("fitted %.4f m vs %.4f m (%.3f%%)", radius, target, 100 * rel(radius, target)));
}

KiteState integrate(KiteState s, double carriage, double duration, SimConfig cfg) {
  ActuatorState act;
  act.steer_carriage_m = act.steer_cmd_m = carriage;
  const auto steps = static_cast<int>(std::lround(duration / cfg.dt_s));
  for (int i = 0; i < steps; ++i) s = step(s, act, 3.4, wind(3.4), kWing, {}, cfg).state;
  return s;
}

double state_error(const KiteState& a, const KiteState& b) {
  return std::max({std::abs(a.elevation_rad - b.elevation_rad),
                   std::abs(a.azimuth_rad - b.azimuth_rad),
                   std::abs(wrap_angle(a.heading_rad - b.heading_rad))});
}

void integrator_order() {
  KiteState s0;
  s0.elevation_rad = 0.5;
  s0.azimuth_rad = -0.2;
  s0.heading_rad = 1.2;
  SimConfig ref, coarse, fine;
  ref.dt_s = 0.02 / 64;
  coarse.dt_s = 0.02;
  fine.dt_s = 0.01;
  const KiteState truth = integrate(s0, 0.03, 10.0, ref);
  const double e1 = state_error(integrate(s0, 0.03, 10.0, coarse), truth);
  const double e2 = state_error(integrate(s0, 0.03, 10.0, fine), truth);
  const double ratio = e1 / e2;
  report(ratio >= 8.0, "rk4-step-halving-order",
         fmt("error(dt=0.02)=%.3e, error(dt=0.01)=%.3e, ratio %.2f", e1, e2, ratio));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void determinism(const char* cli) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = dir / "awe_accept_a.csv";
  const auto b = dir / "awe_accept_b.csv";
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  std::string how;
  if (cli) {
    const std::string base = std::string("\"") + cli +
                             "\" simulate --duration 60 --seed 7 --format json --out ";
    const int ra = std::system((base + "\"" + a.string() + "\" > /dev/null").c_str());
    const int rb = std::system((base + "\"" + b.string() + "\" > /dev/null").c_str());
    if (ra != 0 || rb != 0) {
      report(false, "simulate-determinism", fmt("cli exit codes %d, %d", ra, rb));
      return;
    }
    how = "cli";
  } else {
    AppConfig cfg = parse_config("{}");
    cfg.sim.core.seed = 7;
    flush_csv(run_simulation(cfg, 60.0).samples, a);
    flush_csv(run_simulation(cfg, 60.0).samples, b);
    how = "in-process";
  }
  const std::string x = slurp(a), y = slurp(b);
  report(!x.empty() && x == y, "simulate-determinism",
         fmt("%s, %zu and %zu bytes, %s", how.c_str(), x.size(), y.size(),
             x == y ? "identical" : "different"));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

void sizing_properties() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* what) {
    if (!ok) failed.push_back(what);
  };

  bool quad = true;
  for (double w : {0.5, 1.0, 3.4, 7.25, 12.0}) {
    const double f1 = peak_traction_force(kWing, wind(w));
    const double f2 = peak_traction_force(kWing, wind(2 * w));
    quad = quad && rel(f2, 4 * f1) <= 1e-12;
  }
  check(quad, "quadratic-wind");

  const Environment env = wind(3.4);
  const double ref = std::abs(steering_force_difference(kWing, env, 0.405));
  bool lin = true;
  for (double a : {0.01, 0.1, 0.3, -0.25}) {
    lin = lin && steering_force_difference(kWing, env, -a) == -steering_force_difference(kWing, env, a);
    for (double b : {-0.2, 0.05, 0.4}) {
      const double lhs = steering_force_difference(kWing, env, a + b);
      const double rhs =
          steering_force_difference(kWing, env, a) + steering_force_difference(kWing, env, b);
      lin = lin && std::abs(lhs - rhs) <= 1e-12 * ref;
    }
  }
  check(lin, "steering-linear-odd");

  bool cons = true;
  for (double total : {10.0, 500.0, 1641.6}) {
    for (double p : {0.55, 0.65, 0.75}) {
      for (double d : {-0.2, 0.0, 0.1, 0.3}) {
        const double df = d * (1 - p) * total;
        const LineLoads l = partition_line_loads(total, df, {p});
        cons = cons && !l.clamped &&
               std::abs(l.power_N + l.left_N + l.right_N - total) <= 1e-12 * total &&
               std::abs(l.left_N - l.right_N - df) <= 1e-12 * total;
      }
    }
  }
  check(cons, "partition-conservation");

  const LoggerGroup ga{50, 8, 0.01}, gb{10, 8, 0.02}, gc{3, 4, 0.5};
  const double all = logger_memory({100, {ga, gb, gc}});
  const double sep = logger_memory({100, {ga}}) + logger_memory({100, {gb}}) + logger_memory({100, {gc}});
  check(std::abs(all - sep) <= 1e-12 * all &&
            std::abs(logger_memory({3600, {{50, 8, 0.01}, {10, 8, 0.02}}}) - 158.4e6) <= 1e-3,
        "logger-additivity");

  bool rated = true;
  for (double k : {1.0, 1.1, 1.2, 1.35, 1.6}) {
    for (double cur : {0.5, 1.0, 2.0, 5.0}) {
      PowerSupplyParams s;
      s.battery_count = 4;
      s.peukert_exponent = k;
      s.rated_current_A = cur;
      const auto h = battery_runtime(s, 4 * cur);
      rated = rated && h && std::abs(*h - 20.0 / cur) <= 1e-12 * 20.0 / cur &&
              std::abs(*h - oracle::peukert_hours(20.0, cur, k, cur)) <= 1e-12 * *h;
    }
  }
  check(rated, "battery-rated-point");

  bool round = true;
  for (double a : {4.0, 9.0, 12.0}) {
    for (double cl : {0.6, 0.8, 1.0}) {
      for (double e : {4.0, 5.0, 5.6}) {
        const WingParams w{a, cl, e, 2.7, 1.8};
        round = round && rel(peak_traction_force(w, wind(max_wind_for_wing(w))), 250.0 * a) <= 1e-9;
      }
    }
  }
  check(round, "max-wind-round-trip");

  std::string detail = failed.empty() ? "6/6 properties hold" : "failed:";
  for (const auto& f : failed) detail += " " + f;
  report(failed.empty(), "sizing-property-suite", detail);
}

// Random operator traffic: mostly valid commands, plus stale, malformed,
// out-of-range and oversized frames, mode flips and resets.
std::string fuzz_message(std::mt19937_64& rng, std::uint64_t& seq) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int kind = static_cast<int>(rng() % 100);
  if (kind < 60) {
    return protocol::serialize(protocol::CmdMessage{++seq, u(rng), u(rng)});
  }
  if (kind < 66) {
    return protocol::serialize(
        protocol::ModeMessage{++seq, rng() % 2 ? ControlMode::Auto : ControlMode::Manual});
  }
  if (kind < 68) {
    protocol::ConfigMessage m{++seq, rng() % 3 == 0, std::nullopt};
    if (rng() % 2) m.wind_speed_m_s = 2.0 + 3.0 * (u(rng) + 1.0);
    return protocol::serialize(m);
  }
  if (kind < 74) {
    return protocol::serialize(protocol::CmdMessage{seq > 3 ? seq - rng() % 3 : 0, u(rng), 0.0});
  }
  if (kind < 80) {
    return R"({"type":"cmd","seq":)" + std::to_string(++seq) + R"(,"steering":)" +
           std::to_string(3.0 * u(rng)) + R"(,"power":0})";
  }
  if (kind < 84) return std::string(5000 + rng() % 2000, '[');
  if (kind < 88) {
    return R"({"type":"cmd","seq":-)" + std::to_string(rng() % 100) + R"(,"steering":0})";
  }
  std::string junk(rng() % 80, '\0');
  for (auto& c : junk) c = static_cast<char>(rng() & 0xff);
  if (rng() % 2 && !junk.empty()) junk[0] = '{';
  return junk;
}

void protocol_robustness() {
  AppConfig cfg = parse_config("{}");
  cfg.serve.bind = "127.0.0.1:0";
  // Simulated seconds per wall second; AWE_FUZZ_TIME_SCALE=1 runs the session in real time.
  double kScale = 20.0;
  if (const char* v = std::getenv("AWE_FUZZ_TIME_SCALE")) kScale = std::max(1.0, std::atof(v));
  constexpr double kSessionSeconds = 600.0;
  cfg.serve.time_scale = kScale;

  std::size_t dropped_sessions = 0;
  std::size_t frames = 0, invalid = 0, errors_seen = 0, acks = 0, sent = 0, reconnects = 0;
  std::uint64_t worst_latency = 0;
  double clock = 0.0;
  std::string first_problem;
  bool alive = false;
  const auto t0 = clock_type::now();
  try {
    ServeRunner runner(cfg);
    std::mt19937_64 rng(2024);
    auto observe = [&](const std::string& text) {
      ++frames;
      const std::string problem = protocol::validate_outbound(text);
      if (!problem.empty()) {
        ++invalid;
        if (first_problem.empty()) first_problem = problem;
        return;
      }
      const json j = json::parse(text);
      if (j["type"] == "error") {
        ++errors_seen;
        return;
      }
      clock = std::max(clock, j["clock_s"].get<double>());
      if (!j["ack"].is_null()) {
        ++acks;
        worst_latency = std::max(worst_latency, j["ack"]["latency_steps"].get<std::uint64_t>());
      }
    };

    const double wall_budget = 3.0 * kSessionSeconds / kScale + 30.0;
    while (clock < kSessionSeconds && seconds_since(t0) < wall_budget) {
      try {
        testing_ws::Client op(runner.port());
        std::uint64_t seq = 0;
        const int burst = 2000 + static_cast<int>(rng() % 4000);
        std::unique_ptr<testing_ws::Client> watcher;
        if (rng() % 2) watcher = std::make_unique<testing_ws::Client>(runner.port());
        for (int i = 0; i < burst && clock < kSessionSeconds; ++i) {
          const std::string msg = fuzz_message(rng, seq);
          const bool utf8 = std::all_of(msg.begin(), msg.end(),
                                        [](char c) { return static_cast<unsigned char>(c) < 0x80; });
          // A text frame with invalid UTF-8 makes the server fail the
          // connection, which is exercised but kept rare.
          if (utf8 || rng() % 200 == 0) {
            op.send(msg);
          } else {
            op.send_binary(msg);
          }
          ++sent;
          auto text = op.read();
          if (!text) {
            ++dropped_sessions;
            break;
          }
          observe(*text);
          if (watcher && rng() % 50 == 0) {
            watcher->send(protocol::serialize(protocol::CmdMessage{1, 0.0, 0.0}));
          }
          if (watcher && rng() % 10 == 0) {
            if (auto w = watcher->read()) observe(*w);
          }
        }
      } catch (const boost::system::system_error&) {
        ++dropped_sessions;
      }
      ++reconnects;
      std::this_thread::sleep_for(std::chrono::milliseconds(30));
    }
    testing_ws::Client probe(runner.port());
    const auto text = probe.read();
    alive = text && protocol::validate_outbound(*text).empty();
  } catch (const std::exception& e) {
    first_problem = std::string("exception: ") + e.what();
    alive = false;
  }
  const double wall = seconds_since(t0);
  const bool ok = alive && invalid == 0 && clock >= kSessionSeconds && acks > 0 && worst_latency <= 2;
  report(ok, "protocol-robustness",
         fmt("%.0f s session clock at %gx in %.1f s wall, %zu messages sent, %zu frames "
             "(%zu error replies, %zu invalid), %zu sessions (%zu closed by the server), worst ack latency %llu control "
             "steps, server %s%s%s",
             clock, kScale, wall, sent, frames, errors_seen, invalid, reconnects, dropped_sessions,
             static_cast<unsigned long long>(worst_latency), alive ? "alive" : "DOWN",
             first_problem.empty() ? "" : ", first problem: ", first_problem.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  peak_force_example();
  steering_force_example();
  oscillation_period_example();
  lms_feasibility();
  flight_consistency();
  turn_radius_calibration();
  integrator_order();
  determinism(cli);
  sizing_properties();
  protocol_robustness();
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
