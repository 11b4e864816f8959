#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "awe/sizing.hpp"

namespace awe {

namespace telemetry_flags {
inline constexpr std::uint32_t kOverrange = 1u << 0;      // actuator command clamped
inline constexpr std::uint32_t kForceClamped = 1u << 1;   // steering line went slack
inline constexpr std::uint32_t kWindAlert = 1u << 2;      // wind above wing-loading limit
}  // namespace telemetry_flags

struct TelemetrySample {
  double t = 0;
  double theta = 0;
  double phi = 0;
  double gamma = 0;
  double v = 0;
  double F_total = 0;
  double F_power = 0;
  double F_left = 0;
  double F_right = 0;
  double delta = 0;
  double z = 0;
  double steer_cmd = 0;
  double power_cmd = 0;
  int mode = 0;    // ControlMode
  int status = 0;  // FlightStatus
  double wind = 0;
  std::uint32_t flags = 0;

  static constexpr std::size_t kFieldCount = 17;
  // In-memory accounting: 8 bytes per field.
  static constexpr std::size_t kBytes = kFieldCount * 8;

  bool all_finite() const;
  bool operator==(const TelemetrySample&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "t,theta,phi,gamma,v,F_total,F_power,F_left,F_right,delta,z,steer_cmd,power_cmd,mode,status,"
    "wind,flags";

// The logging plan for a telemetry stream of this sample layout.
LoggerPlan telemetry_logger_plan(double duration_s, double sample_period_s);

enum class RecordResult { Appended, BudgetExhausted, Rejected };

// Append-only telemetry log with a fixed byte budget. When the budget is
// reached logging stops and the event is remembered; the caller keeps going.
class TelemetryLog {
 public:
  explicit TelemetryLog(double budget_bytes, std::size_t row_bytes = TelemetrySample::kBytes);

  RecordResult record(const TelemetrySample& sample);

  const std::vector<TelemetrySample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t bytes_used() const { return samples_.size() * row_bytes_; }
  std::size_t fault_count() const { return faults_; }
  bool budget_exhausted() const { return exhausted_; }

 private:
  std::size_t row_bytes_;
  std::size_t capacity_;
  std::vector<TelemetrySample> samples_;
  std::size_t faults_ = 0;
  bool exhausted_ = false;
};

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t row, std::string column)
      : std::runtime_error(what), row_(row), column_(std::move(column)) {}
  // 1-based line number in the file; 1 is the header.
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

std::string format_csv(const std::vector<TelemetrySample>& samples);
std::vector<TelemetrySample> parse_csv(std::string_view text);

// Writes header plus one row per sample; returns the number of rows.
std::size_t flush_csv(const std::vector<TelemetrySample>& samples,
                      const std::filesystem::path& path);
std::vector<TelemetrySample> replay(const std::filesystem::path& path);

}  // namespace awe
