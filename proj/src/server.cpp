#include "awe/server.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "awe/protocol.hpp"

namespace awe {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class Connection;

}  // namespace

struct WsServer::Impl {
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  Handlers handlers;
  std::size_t capacity;
  std::atomic<std::uint64_t> dropped{0};
  std::atomic<std::size_t> open_count{0};
  std::vector<std::weak_ptr<Connection>> connections;  // I/O thread only
  bool operator_active = false;                        // I/O thread only

  Impl(Handlers h, std::size_t cap) : handlers(std::move(h)), capacity(cap) {}
  void do_accept();
};

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket&& socket, WsServer::Impl* server)
      : ws_(std::move(socket)), server_(server) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(1u << 20);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void enqueue(const std::shared_ptr<const std::string>& frame) {
    if (!open_) return;
    // The front entry may be mid-write; only the ones behind it can go.
    const std::size_t in_flight = writing_ ? 1 : 0;
    while (queue_.size() - in_flight >= server_->capacity && queue_.size() > in_flight) {
      queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(in_flight));
      ++server_->dropped;
    }
    queue_.push_back(frame);
    if (!writing_) do_write();
  }

  void shutdown() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    open_ = true;
    ctx_.is_operator = !server_->operator_active;
    if (ctx_.is_operator) server_->operator_active = true;
    server_->connections.push_back(weak_from_this());
    ++server_->open_count;
    if (server_->handlers.on_open) server_->handlers.on_open(ctx_.is_operator);
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      close();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    std::optional<std::string> reply;
    try {
      if (!ws_.got_text()) {
        reply = protocol::error_frame(std::nullopt, "bad_frame", "binary frames are not accepted");
      } else if (server_->handlers.on_message) {
        reply = server_->handlers.on_message(text, ctx_);
      }
    } catch (const std::exception& e) {
      reply = protocol::error_frame(std::nullopt, "internal", e.what());
    }
    if (reply) enqueue(std::make_shared<const std::string>(std::move(*reply)));
    do_read();
  }

  void do_write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->on_write(ec);
                    });
  }

  void on_write(beast::error_code ec) {
    if (!queue_.empty()) queue_.pop_front();
    writing_ = false;
    if (ec || !open_) {
      close();
      return;
    }
    if (!queue_.empty()) do_write();
  }

  void close() {
    if (!open_) return;
    open_ = false;
    // The in-flight frame must outlive its pending write.
    if (writing_) {
      queue_.erase(queue_.begin() + 1, queue_.end());
    } else {
      queue_.clear();
    }
    --server_->open_count;
    if (ctx_.is_operator) server_->operator_active = false;
    auto& list = server_->connections;
    std::erase_if(list, [this](const std::weak_ptr<Connection>& w) {
      auto p = w.lock();
      return !p || p.get() == this;
    });
    if (server_->handlers.on_close) server_->handlers.on_close(ctx_.is_operator);
  }

  websocket::stream<beast::tcp_stream> ws_;
  WsServer::Impl* server_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool writing_ = false;
  bool open_ = false;
  ConnectionContext ctx_;
};

}  // namespace

void WsServer::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (!acceptor.is_open()) return;
    if (!ec) std::make_shared<Connection>(std::move(socket), this)->start();
    do_accept();
  });
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw std::invalid_argument("bind address must look like host:port, got '" + text + "'");
  Endpoint ep;
  ep.host = text.substr(0, colon);
  if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']')
    ep.host = ep.host.substr(1, ep.host.size() - 2);
  const std::string port = text.substr(colon + 1);
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port.size() || value > 65535)
    throw std::invalid_argument("invalid port in bind address '" + text + "'");
  ep.port = static_cast<unsigned short>(value);
  return ep;
}

WsServer::WsServer(const Endpoint& ep, Handlers handlers, std::size_t queue_capacity)
    : impl_(std::make_shared<Impl>(std::move(handlers), queue_capacity)) {
  tcp::resolver resolver(impl_->ioc);
  const auto results = resolver.resolve(ep.host, std::to_string(ep.port));
  if (results.empty()) throw std::runtime_error("cannot resolve '" + ep.host + "'");
  const tcp::endpoint endpoint = results.begin()->endpoint();
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen(net::socket_base::max_listen_connections);
  impl_->do_accept();
  io_thread_ = std::thread([impl = impl_] { impl->ioc.run(); });
}

WsServer::~WsServer() { stop(); }

unsigned short WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::broadcast(std::string frame) {
  auto shared = std::make_shared<const std::string>(std::move(frame));
  net::post(impl_->ioc, [impl = impl_.get(), shared] {
    for (const auto& w : impl->connections) {
      if (auto c = w.lock()) c->enqueue(shared);
    }
  });
}

std::uint64_t WsServer::dropped() const { return impl_->dropped.load(); }

std::size_t WsServer::connection_count() const { return impl_->open_count.load(); }

void WsServer::stop() {
  if (!io_thread_.joinable()) return;
  net::post(impl_->ioc, [impl = impl_.get()] {
    beast::error_code ec;
    impl->acceptor.close(ec);
    for (const auto& w : impl->connections) {
      if (auto c = w.lock()) c->shutdown();
    }
  });
  // Let the closes run, then stop whatever is still pending.
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(500);
  while (impl_->open_count.load() > 0 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  impl_->ioc.stop();
  io_thread_.join();
}

ServeRunner::ServeRunner(const AppConfig& cfg)
    : cfg_(cfg), session_(std::make_unique<ServeSession>(cfg)) {
  WsServer::Handlers h;
  h.on_open = [this](bool is_operator) {
    if (is_operator) session_->set_operator_connected(true);
  };
  h.on_message = [this](std::string_view text, ConnectionContext& ctx) {
    return session_->receive(text, ctx);
  };
  h.on_close = [this](bool was_operator) {
    if (was_operator) session_->set_operator_connected(false);
  };
  server_ = std::make_unique<WsServer>(parse_endpoint(cfg.serve.bind), std::move(h),
                                       cfg.serve.queue_capacity);
  sim_thread_ = std::thread([this] { sim_loop(); });
}

ServeRunner::~ServeRunner() {
  stop();
  wait();
  server_->stop();
}

void ServeRunner::stop() { stop_ = true; }

void ServeRunner::wait() {
  if (sim_thread_.joinable()) sim_thread_.join();
}

void ServeRunner::sim_loop() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(session_->tick_period_s()));
  auto next = clock::now();
  while (!stop_.load()) {
    session_->set_dropped(server_->dropped());
    if (auto frame = session_->tick()) server_->broadcast(std::move(*frame));
    next += period;
    const auto now = clock::now();
    if (now > next + std::chrono::milliseconds(250)) {
      // Fell far behind (machine stalled); do not try to catch up in a burst.
      next = now;
    } else if (next > now) {
      std::this_thread::sleep_until(next);
    }
  }
}

std::string replay_frame(std::uint64_t seq, const TelemetrySample& s) {
  protocol::TelemetryFrame f;
  f.seq = seq;
  f.sample = s;
  f.clock_s = s.t;
  return protocol::telemetry_frame(f);
}

void replay_over_websocket(const std::vector<TelemetrySample>& samples, const AppConfig& cfg,
                           const std::atomic<bool>& stop,
                           const std::function<void(unsigned short)>& on_listening) {
  WsServer::Handlers h;
  h.on_message = [](std::string_view, ConnectionContext&) -> std::optional<std::string> {
    return protocol::error_frame(std::nullopt, "read_only", "replay sessions ignore commands");
  };
  WsServer server(parse_endpoint(cfg.serve.bind), std::move(h), cfg.serve.queue_capacity);
  if (on_listening) on_listening(server.port());

  using clock = std::chrono::steady_clock;
  while (server.connection_count() == 0) {
    if (stop.load()) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  std::size_t every = 1;
  if (samples.size() >= 2) {
    const double period = samples[1].t - samples[0].t;
    if (period > 0) {
      every = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(1.0 / (cfg.serve.stream_rate_hz * period))));
    }
  }
  const auto start = clock::now();
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < samples.size() && !stop.load(); i += every) {
    const double offset = (samples[i].t - samples.front().t) / cfg.serve.time_scale;
    std::this_thread::sleep_until(start + std::chrono::duration_cast<clock::duration>(
                                              std::chrono::duration<double>(offset)));
    server.broadcast(replay_frame(seq++, samples[i]));
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
}

}  // namespace awe
