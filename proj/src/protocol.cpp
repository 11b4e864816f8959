#include "awe/protocol.hpp"

#include <array>
#include <cmath>

namespace awe::protocol {

namespace {

using nlohmann::json;

constexpr std::array<const char*, TelemetrySample::kFieldCount> kSampleKeys = {
    "t",       "theta",   "phi",     "gamma",     "v",         "F_total",
    "F_power", "F_left",  "F_right", "delta",     "z",         "steer_cmd",
    "power_cmd", "mode",  "status",  "wind",      "flags"};

std::optional<std::uint64_t> peek_seq(const json& j) {
  if (!j.is_object()) return std::nullopt;
  auto it = j.find("seq");
  if (it == j.end() || !it->is_number_unsigned()) return std::nullopt;
  return it->get<std::uint64_t>();
}

void allow_only(const json& j, std::initializer_list<const char*> keys,
                std::optional<std::uint64_t> seq) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ProtocolError("bad_field", "unknown field '" + it.key() + "'", seq);
  }
}

double number_field(const json& j, const char* key, double lo, double hi,
                    std::optional<std::uint64_t> seq) {
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError("bad_field", std::string("missing field '") + key + "'", seq);
  if (!it->is_number())
    throw ProtocolError("bad_field", std::string("field '") + key + "' must be a number", seq);
  const double v = it->get<double>();
  if (!std::isfinite(v) || v < lo || v > hi) {
    throw ProtocolError("out_of_range", std::string("field '") + key + "' out of range", seq);
  }
  return v;
}

}  // namespace

std::uint64_t sequence_of(const Inbound& m) {
  return std::visit([](const auto& x) { return x.seq; }, m);
}

Inbound parse_inbound(std::string_view text) {
  if (text.size() > kMaxFrameBytes) throw ProtocolError("too_large", "frame exceeds size limit");
  const json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) throw ProtocolError("bad_json", "frame is not valid JSON");
  if (!j.is_object()) throw ProtocolError("bad_frame", "frame must be a JSON object");

  const auto seq = peek_seq(j);
  auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string())
    throw ProtocolError("bad_frame", "missing string field 'type'", seq);
  if (!seq) throw ProtocolError("bad_field", "field 'seq' must be a non-negative integer");
  const std::string type = type_it->get<std::string>();

  if (type == "cmd") {
    allow_only(j, {"type", "seq", "steering", "power"}, seq);
    CmdMessage m;
    m.seq = *seq;
    m.steering = number_field(j, "steering", -1.0, 1.0, seq);
    m.power = number_field(j, "power", -1.0, 1.0, seq);
    return m;
  }
  if (type == "mode") {
    allow_only(j, {"type", "seq", "mode"}, seq);
    auto it = j.find("mode");
    if (it == j.end() || !it->is_string())
      throw ProtocolError("bad_field", "field 'mode' must be a string", seq);
    const std::string mode = it->get<std::string>();
    ModeMessage m;
    m.seq = *seq;
    if (mode == "manual") {
      m.mode = ControlMode::Manual;
    } else if (mode == "auto") {
      m.mode = ControlMode::Auto;
    } else {
      throw ProtocolError("out_of_range", "field 'mode' must be \"manual\" or \"auto\"", seq);
    }
    return m;
  }
  if (type == "config") {
    allow_only(j, {"type", "seq", "reset", "wind_speed_m_s"}, seq);
    ConfigMessage m;
    m.seq = *seq;
    if (auto it = j.find("reset"); it != j.end()) {
      if (!it->is_boolean()) throw ProtocolError("bad_field", "field 'reset' must be a boolean", seq);
      m.reset = it->get<bool>();
    }
    if (j.contains("wind_speed_m_s")) {
      m.wind_speed_m_s = number_field(j, "wind_speed_m_s", 0.0, kMaxWindSpeed, seq);
    }
    return m;
  }
  throw ProtocolError("bad_frame", "unknown message type '" + type + "'", seq);
}

std::string serialize(const Inbound& m) {
  nlohmann::ordered_json j;
  if (const auto* c = std::get_if<CmdMessage>(&m)) {
    j = {{"type", "cmd"}, {"seq", c->seq}, {"steering", c->steering}, {"power", c->power}};
  } else if (const auto* mm = std::get_if<ModeMessage>(&m)) {
    j = {{"type", "mode"}, {"seq", mm->seq}, {"mode", to_string(mm->mode)}};
  } else {
    const auto& cm = std::get<ConfigMessage>(m);
    j = {{"type", "config"}, {"seq", cm.seq}, {"reset", cm.reset}};
    if (cm.wind_speed_m_s) j["wind_speed_m_s"] = *cm.wind_speed_m_s;
  }
  return j.dump();
}

nlohmann::ordered_json sample_to_json(const TelemetrySample& s) {
  return {{"t", s.t},
          {"theta", s.theta},
          {"phi", s.phi},
          {"gamma", s.gamma},
          {"v", s.v},
          {"F_total", s.F_total},
          {"F_power", s.F_power},
          {"F_left", s.F_left},
          {"F_right", s.F_right},
          {"delta", s.delta},
          {"z", s.z},
          {"steer_cmd", s.steer_cmd},
          {"power_cmd", s.power_cmd},
          {"mode", s.mode},
          {"status", s.status},
          {"wind", s.wind},
          {"flags", s.flags}};
}

TelemetrySample sample_from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError("bad_frame", "sample must be an object");
  if (j.size() != kSampleKeys.size()) throw ProtocolError("bad_frame", "sample has wrong field count");
  auto num = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
      throw ProtocolError("bad_field", std::string("sample field '") + key + "' missing or not a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ProtocolError("bad_field", std::string("sample field '") + key + "' not finite");
    return v;
  };
  auto whole = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_unsigned())
      throw ProtocolError("bad_field", std::string("sample field '") + key + "' must be an unsigned integer");
    return it->get<std::uint64_t>();
  };
  TelemetrySample s;
  s.t = num("t");
  s.theta = num("theta");
  s.phi = num("phi");
  s.gamma = num("gamma");
  s.v = num("v");
  s.F_total = num("F_total");
  s.F_power = num("F_power");
  s.F_left = num("F_left");
  s.F_right = num("F_right");
  s.delta = num("delta");
  s.z = num("z");
  s.steer_cmd = num("steer_cmd");
  s.power_cmd = num("power_cmd");
  s.mode = static_cast<int>(whole("mode"));
  s.status = static_cast<int>(whole("status"));
  s.wind = num("wind");
  s.flags = static_cast<std::uint32_t>(whole("flags"));
  return s;
}

std::string telemetry_frame(const TelemetryFrame& f) {
  nlohmann::ordered_json j;
  j["type"] = "telemetry";
  j["seq"] = f.seq;
  j["schema"] = kSchemaVersion;
  j["sample"] = sample_to_json(f.sample);
  j["clock_s"] = f.clock_s;
  j["paused"] = f.paused;
  if (f.ack) {
    j["ack"] = {{"seq", f.ack->seq}, {"latency_steps", f.ack->latency_steps}};
  } else {
    j["ack"] = nullptr;
  }
  j["counters"] = {{"errors", f.counters.errors},
                   {"stale", f.counters.stale},
                   {"dropped", f.counters.dropped},
                   {"inbound_overflow", f.counters.inbound_overflow}};
  return j.dump();
}

std::string error_frame(std::optional<std::uint64_t> seq, const std::string& code,
                        const std::string& message) {
  nlohmann::ordered_json j;
  j["type"] = "error";
  j["seq"] = seq ? nlohmann::ordered_json(*seq) : nlohmann::ordered_json(nullptr);
  j["code"] = code;
  j["message"] = message;
  // Messages may quote client bytes; replace invalid UTF-8 rather than throw.
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::string validate_outbound(std::string_view text) {
  const json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) return "not valid JSON";
  if (!j.is_object()) return "not an object";
  auto type = j.find("type");
  if (type == j.end() || !type->is_string()) return "missing type";

  if (*type == "telemetry") {
    for (const char* k : {"seq", "schema", "sample", "clock_s", "paused", "ack", "counters"}) {
      if (!j.contains(k)) return std::string("missing ") + k;
    }
    if (j.size() != 8) return "unexpected field count";
    if (!j["seq"].is_number_unsigned()) return "seq not unsigned";
    if (j["schema"] != kSchemaVersion) return "wrong schema version";
    if (!j["clock_s"].is_number() || !std::isfinite(j["clock_s"].get<double>())) return "bad clock_s";
    if (!j["paused"].is_boolean()) return "bad paused";
    try {
      (void)sample_from_json(j["sample"]);
    } catch (const ProtocolError& e) {
      return e.what();
    }
    const auto& ack = j["ack"];
    if (!ack.is_null()) {
      if (!ack.is_object() || ack.size() != 2 || !ack.contains("seq") ||
          !ack["seq"].is_number_unsigned() || !ack.contains("latency_steps") ||
          !ack["latency_steps"].is_number_unsigned())
        return "bad ack";
    }
    const auto& c = j["counters"];
    if (!c.is_object() || c.size() != 4) return "bad counters";
    for (const char* k : {"errors", "stale", "dropped", "inbound_overflow"}) {
      if (!c.contains(k) || !c[k].is_number_unsigned()) return std::string("bad counter ") + k;
    }
    return {};
  }
  if (*type == "error") {
    if (j.size() != 4) return "unexpected field count";
    if (!j.contains("seq") || !(j["seq"].is_null() || j["seq"].is_number_unsigned())) return "bad seq";
    if (!j.contains("code") || !j["code"].is_string()) return "bad code";
    if (!j.contains("message") || !j["message"].is_string()) return "bad message";
    return {};
  }
  return "unknown type";
}

}  // namespace awe::protocol
