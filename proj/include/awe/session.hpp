#pragma once

// Transport-independent core of `serve`: the simulation owner on one side,
// connection handlers on the other, joined by a bounded inbound queue.

#include <atomic>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "awe/config.hpp"
#include "awe/flight.hpp"
#include "awe/protocol.hpp"

namespace awe {

// Per-connection protocol state, owned by the connection handler.
struct ConnectionContext {
  bool is_operator = false;
  std::optional<std::uint64_t> last_seq;
};

class ServeSession {
 public:
  explicit ServeSession(const AppConfig& cfg);

  // Connection side; safe to call from any thread. Returns a frame to send
  // back to this connection (error reports only).
  std::optional<std::string> receive(std::string_view text, ConnectionContext& conn);
  void set_operator_connected(bool connected);
  // Frames the transport discarded for slow consumers, as a running total.
  void set_dropped(std::uint64_t n) { dropped_ = n; }

  // Simulation side; one physics step of session time, or a held step while
  // paused. Returns a telemetry frame when one is due.
  std::optional<std::string> tick();

  // Wall-clock duration of one tick at the configured time scale.
  double tick_period_s() const;

  bool paused() const { return !operator_connected_.load(); }
  const Flight& flight() const { return flight_; }
  protocol::Counters counters() const;
  std::optional<protocol::Ack> last_ack() const { return last_ack_; }
  std::uint64_t ticks() const { return ticks_; }

 private:
  struct Pending {
    protocol::Inbound message;
    std::uint64_t received_at = 0;  // control steps completed at receipt
  };

  void drain();
  void apply(const protocol::Inbound& m);

  AppConfig cfg_;
  Flight flight_;
  int stream_every_;
  std::size_t capacity_;

  std::mutex queue_mutex_;
  std::deque<Pending> queue_;

  std::atomic<bool> operator_connected_{false};
  std::atomic<std::uint64_t> control_steps_{0};
  std::atomic<std::uint64_t> errors_{0};
  std::atomic<std::uint64_t> stale_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> overflow_{0};

  std::uint64_t ticks_ = 0;
  std::uint64_t clock_steps_ = 0;
  std::uint64_t telemetry_seq_ = 0;
  std::optional<protocol::Ack> last_ack_;
};

}  // namespace awe
