#include "awe/telemetry.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace awe {

namespace {

constexpr std::array<std::string_view, TelemetrySample::kFieldCount> kColumns = {
    "t",       "theta", "phi",       "gamma",     "v",    "F_total", "F_power", "F_left", "F_right",
    "delta",   "z",     "steer_cmd", "power_cmd", "mode", "status",  "wind",    "flags"};

void append_number(std::string& out, double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.9g", x);
  out.append(buf, static_cast<std::size_t>(n));
}

std::array<double, TelemetrySample::kFieldCount> to_row(const TelemetrySample& s) {
  return {s.t,       s.theta, s.phi,       s.gamma,     s.v,
          s.F_total, s.F_power, s.F_left,  s.F_right,   s.delta,
          s.z,       s.steer_cmd, s.power_cmd, double(s.mode), double(s.status),
          s.wind,    double(s.flags)};
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

bool TelemetrySample::all_finite() const {
  for (double x : to_row(*this))
    if (!std::isfinite(x)) return false;
  return true;
}

LoggerPlan telemetry_logger_plan(double duration_s, double sample_period_s) {
  LoggerPlan plan;
  plan.duration_s = duration_s;
  plan.groups.push_back({double(TelemetrySample::kFieldCount), 8.0, sample_period_s});
  return plan;
}

TelemetryLog::TelemetryLog(double budget_bytes, std::size_t row_bytes)
    : row_bytes_(row_bytes),
      capacity_(budget_bytes > 0 ? static_cast<std::size_t>(
                                       std::floor(budget_bytes / double(row_bytes) + 1e-9))
                                 : 0) {
  samples_.reserve(std::min<std::size_t>(capacity_, 1u << 20));
}

RecordResult TelemetryLog::record(const TelemetrySample& sample) {
  if (!sample.all_finite() || (!samples_.empty() && !(sample.t > samples_.back().t))) {
    ++faults_;
    return RecordResult::Rejected;
  }
  if (samples_.size() >= capacity_) {
    exhausted_ = true;
    return RecordResult::BudgetExhausted;
  }
  samples_.push_back(sample);
  return RecordResult::Appended;
}

std::string format_csv(const std::vector<TelemetrySample>& samples) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const auto& s : samples) {
    const auto row = to_row(s);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      append_number(out, row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<TelemetrySample> parse_csv(std::string_view text) {
  if (text.empty()) throw CsvError("no header", 1, "");
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  next_line(line);
  const auto header = split(line);
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i >= header.size()) {
      throw CsvError("missing column '" + std::string(kColumns[i]) + "' in header", 1,
                     std::string(kColumns[i]));
    }
    if (header[i] != kColumns[i]) {
      throw CsvError("header column " + std::to_string(i + 1) + " is '" + std::string(header[i]) +
                         "', expected '" + std::string(kColumns[i]) + "'",
                     1, std::string(kColumns[i]));
    }
  }
  if (header.size() > kColumns.size()) {
    throw CsvError("unexpected extra column '" + std::string(header[kColumns.size()]) + "'", 1,
                   std::string(header[kColumns.size()]));
  }

  std::vector<TelemetrySample> out;
  while (next_line(line)) {
    if (line.empty() && pos >= text.size()) break;
    const auto cells = split(line);
    if (cells.size() != kColumns.size()) {
      throw CsvError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                         " fields, expected " + std::to_string(kColumns.size()),
                     line_no, cells.size() < kColumns.size() ? std::string(kColumns[cells.size()])
                                                             : std::string());
    }
    std::array<double, TelemetrySample::kFieldCount> v{};
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto cell = cells[i];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v[i]);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v[i])) {
        throw CsvError("row " + std::to_string(line_no) + ", column '" + std::string(kColumns[i]) +
                           "': invalid number '" + std::string(cell) + "'",
                       line_no, std::string(kColumns[i]));
      }
    }
    for (std::size_t i : {13u, 14u, 16u}) {
      if (v[i] != std::floor(v[i]) || v[i] < 0) {
        throw CsvError("row " + std::to_string(line_no) + ", column '" + std::string(kColumns[i]) +
                           "': expected a non-negative integer",
                       line_no, std::string(kColumns[i]));
      }
    }
    TelemetrySample s;
    s.t = v[0];
    s.theta = v[1];
    s.phi = v[2];
    s.gamma = v[3];
    s.v = v[4];
    s.F_total = v[5];
    s.F_power = v[6];
    s.F_left = v[7];
    s.F_right = v[8];
    s.delta = v[9];
    s.z = v[10];
    s.steer_cmd = v[11];
    s.power_cmd = v[12];
    s.mode = static_cast<int>(v[13]);
    s.status = static_cast<int>(v[14]);
    s.wind = v[15];
    s.flags = static_cast<std::uint32_t>(v[16]);
    out.push_back(s);
  }
  return out;
}

std::size_t flush_csv(const std::vector<TelemetrySample>& samples,
                      const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  const std::string text = format_csv(samples);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("write to '" + path.string() + "' failed");
  return samples.size();
}

std::vector<TelemetrySample> replay(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace awe
