#include "awe/session.hpp"

#include <cmath>
#include <vector>

namespace awe {

ServeSession::ServeSession(const AppConfig& cfg)
    : cfg_(cfg),
      flight_(cfg),
      stream_every_(static_cast<int>(
          std::lround(1.0 / (cfg.serve.stream_rate_hz * cfg.sim.core.dt_s)))),
      capacity_(cfg.serve.queue_capacity) {}

double ServeSession::tick_period_s() const { return cfg_.sim.core.dt_s / cfg_.serve.time_scale; }

std::optional<std::string> ServeSession::receive(std::string_view text, ConnectionContext& conn) {
  protocol::Inbound msg;
  try {
    msg = protocol::parse_inbound(text);
  } catch (const protocol::ProtocolError& e) {
    ++errors_;
    return protocol::error_frame(e.seq(), e.code(), e.what());
  }
  const std::uint64_t seq = protocol::sequence_of(msg);
  if (!conn.is_operator) {
    ++errors_;
    return protocol::error_frame(seq, "read_only", "observer connections cannot send commands");
  }
  if (conn.last_seq && seq <= *conn.last_seq) {
    ++stale_;
    return std::nullopt;
  }
  conn.last_seq = seq;

  std::lock_guard lock(queue_mutex_);
  if (queue_.size() >= capacity_) {
    ++overflow_;
    return protocol::error_frame(seq, "busy", "inbound queue full, message dropped");
  }
  queue_.push_back({std::move(msg), control_steps_.load()});
  return std::nullopt;
}

void ServeSession::set_operator_connected(bool connected) { operator_connected_ = connected; }

protocol::Counters ServeSession::counters() const {
  return {errors_.load(), stale_.load(), dropped_.load(), overflow_.load()};
}

void ServeSession::apply(const protocol::Inbound& m) {
  if (const auto* c = std::get_if<protocol::CmdMessage>(&m)) {
    flight_.set_manual({c->steering, c->power});
  } else if (const auto* mm = std::get_if<protocol::ModeMessage>(&m)) {
    flight_.set_mode(mm->mode);
  } else {
    const auto& cm = std::get<protocol::ConfigMessage>(m);
    if (cm.wind_speed_m_s) flight_.set_wind_speed(*cm.wind_speed_m_s);
    if (cm.reset) flight_.reset();
  }
}

void ServeSession::drain() {
  std::vector<Pending> batch;
  std::uint64_t now = 0;
  {
    std::lock_guard lock(queue_mutex_);
    batch.assign(std::make_move_iterator(queue_.begin()), std::make_move_iterator(queue_.end()));
    queue_.clear();
    now = ++control_steps_;
  }
  for (const auto& p : batch) {
    apply(p.message);
    last_ack_ = protocol::Ack{protocol::sequence_of(p.message), now - p.received_at};
  }
}

std::optional<std::string> ServeSession::tick() {
  const bool running = operator_connected_.load();
  const bool boundary = running && !flight_.terminated()
                            ? flight_.control_due()
                            : ticks_ % static_cast<std::uint64_t>(flight_.steps_per_control()) == 0;
  if (boundary) drain();
  if (running) {
    try {
      flight_.step();
    } catch (const SimulationFault&) {
      // Keep serving; the operator sees the restart in the telemetry.
      ++errors_;
      flight_.reset();
    }
    ++clock_steps_;
  }

  std::optional<std::string> frame;
  if (ticks_ % static_cast<std::uint64_t>(stream_every_) == 0) {
    protocol::TelemetryFrame f;
    f.seq = telemetry_seq_++;
    f.sample = flight_.sample();
    f.clock_s = static_cast<double>(clock_steps_) * cfg_.sim.core.dt_s;
    f.paused = !running;
    f.ack = last_ack_;
    f.counters = counters();
    frame = protocol::telemetry_frame(f);
  }
  ++ticks_;
  return frame;
}

}  // namespace awe
