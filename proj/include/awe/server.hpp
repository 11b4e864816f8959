#pragma once

// WebSocket front end for `serve` and `replay --bind`.

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "awe/config.hpp"
#include "awe/session.hpp"
#include "awe/telemetry.hpp"

namespace awe {

struct Endpoint {
  std::string host;
  unsigned short port = 0;
};

// Parses "host:port"; throws std::invalid_argument.
Endpoint parse_endpoint(const std::string& text);

// Accepts WebSocket connections and fans frames out to them. One I/O thread.
// The first connection to arrive while none is active becomes the operator;
// later ones are observers.
class WsServer {
 public:
  struct Handlers {
    std::function<void(bool is_operator)> on_open;
    // Returns a reply for the sender only.
    std::function<std::optional<std::string>(std::string_view, ConnectionContext&)> on_message;
    std::function<void(bool was_operator)> on_close;
  };

  WsServer(const Endpoint& ep, Handlers handlers, std::size_t queue_capacity);
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  unsigned short port() const;

  // Non-blocking; safe from any thread. Slow consumers lose their oldest
  // queued frames.
  void broadcast(std::string frame);

  std::uint64_t dropped() const;
  std::size_t connection_count() const;
  void stop();

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
  std::thread io_thread_;
};

// Owns a ServeSession, its paced simulation thread and the WebSocket server.
class ServeRunner {
 public:
  explicit ServeRunner(const AppConfig& cfg);
  ~ServeRunner();

  unsigned short port() const { return server_->port(); }
  void stop();
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();
  const ServeSession& session() const { return *session_; }

 private:
  void sim_loop();

  AppConfig cfg_;
  std::unique_ptr<ServeSession> session_;
  std::unique_ptr<WsServer> server_;
  std::atomic<bool> stop_{false};
  std::thread sim_thread_;
};

// Streams a recorded log as telemetry frames, paced by the sample times.
// Starts when the first client connects; returns when the log is exhausted.
void replay_over_websocket(const std::vector<TelemetrySample>& samples, const AppConfig& cfg,
                           const std::atomic<bool>& stop,
                           const std::function<void(unsigned short)>& on_listening = {});

// Telemetry frame for one replayed sample.
std::string replay_frame(std::uint64_t seq, const TelemetrySample& s);

}  // namespace awe
