#pragma once

// Operator-console wire protocol: JSON text frames over WebSocket.
//
// Inbound:
//   {"type":"cmd","seq":N,"steering":x,"power":y}        x, y in [-1, 1]
//   {"type":"mode","seq":N,"mode":"manual"|"auto"}
//   {"type":"config","seq":N,"reset":true,"wind_speed_m_s":w}   both optional
// Outbound:
//   {"type":"telemetry","seq":N,"schema":1,"sample":{...}, ...}
//   {"type":"error","seq":N|null,"code":"...","message":"..."}

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "awe/autopilot.hpp"
#include "awe/telemetry.hpp"

namespace awe::protocol {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = 4096;
inline constexpr double kMaxWindSpeed = 40.0;

struct CmdMessage {
  std::uint64_t seq = 0;
  double steering = 0;
  double power = 0;
};

struct ModeMessage {
  std::uint64_t seq = 0;
  ControlMode mode = ControlMode::Manual;
};

struct ConfigMessage {
  std::uint64_t seq = 0;
  bool reset = false;
  std::optional<double> wind_speed_m_s;
};

using Inbound = std::variant<CmdMessage, ModeMessage, ConfigMessage>;

std::uint64_t sequence_of(const Inbound& m);

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& what, std::optional<std::uint64_t> seq = {})
      : std::runtime_error(what), code_(std::move(code)), seq_(seq) {}
  // Machine-readable: bad_json, bad_frame, bad_field, out_of_range, too_large.
  const std::string& code() const { return code_; }
  // Sequence number, when the frame carried a readable one.
  std::optional<std::uint64_t> seq() const { return seq_; }

 private:
  std::string code_;
  std::optional<std::uint64_t> seq_;
};

// Strict parse: unknown fields, missing fields, wrong types and out-of-range
// values throw ProtocolError.
Inbound parse_inbound(std::string_view text);

std::string serialize(const Inbound& m);

struct Ack {
  std::uint64_t seq = 0;
  std::uint64_t latency_steps = 0;  // control steps between receipt and application
};

struct Counters {
  std::uint64_t errors = 0;
  std::uint64_t stale = 0;
  std::uint64_t dropped = 0;
  std::uint64_t inbound_overflow = 0;
};

struct TelemetryFrame {
  std::uint64_t seq = 0;
  TelemetrySample sample;
  double clock_s = 0;  // session clock; keeps running across resets
  bool paused = false;
  std::optional<Ack> ack;
  Counters counters;
};

nlohmann::ordered_json sample_to_json(const TelemetrySample& s);
TelemetrySample sample_from_json(const nlohmann::json& j);

std::string telemetry_frame(const TelemetryFrame& f);
std::string error_frame(std::optional<std::uint64_t> seq, const std::string& code,
                        const std::string& message);

// Checks an outbound frame against the published schema. Returns an empty
// string when valid, otherwise a description of the first problem.
std::string validate_outbound(std::string_view text);

}  // namespace awe::protocol
