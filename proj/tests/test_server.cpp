#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "json.hpp"

#include "awe/config.hpp"
#include "awe/protocol.hpp"
#include "awe/server.hpp"
#include "ws_client.hpp"

using namespace awe;
using nlohmann::json;
using testing_ws::Client;

namespace {

AppConfig loopback_config() {
  AppConfig cfg = parse_config("{}");
  cfg.serve.bind = "127.0.0.1:0";
  return cfg;
}

std::optional<json> next_of_type(Client& c, const std::string& type, int max_frames = 200) {
  for (int i = 0; i < max_frames; ++i) {
    auto text = c.read();
    if (!text) return std::nullopt;
    json j = json::parse(*text);
    if (j["type"] == type) return j;
  }
  return std::nullopt;
}

}  // namespace

TEST(Endpoint, Parses) {
  const auto ep = parse_endpoint("127.0.0.1:8765");
  EXPECT_EQ(ep.host, "127.0.0.1");
  EXPECT_EQ(ep.port, 8765);
  EXPECT_EQ(parse_endpoint("[::1]:80").host, "::1");
  EXPECT_THROW(parse_endpoint("localhost"), std::invalid_argument);
  EXPECT_THROW(parse_endpoint(":80"), std::invalid_argument);
  EXPECT_THROW(parse_endpoint("host:"), std::invalid_argument);
  EXPECT_THROW(parse_endpoint("host:70000"), std::invalid_argument);
  EXPECT_THROW(parse_endpoint("host:8x"), std::invalid_argument);
}

TEST(Serve, StreamsValidTelemetry) {
  ServeRunner runner(loopback_config());
  ASSERT_NE(runner.port(), 0);
  Client op(runner.port());
  for (int i = 0; i < 10; ++i) {
    auto text = op.read();
    ASSERT_TRUE(text);
    EXPECT_EQ(protocol::validate_outbound(*text), "");
  }
}

TEST(Serve, OperatorCommandIsAcknowledged) {
  ServeRunner runner(loopback_config());
  Client op(runner.port());
  ASSERT_TRUE(op.read());
  op.send(R"({"type":"mode","seq":1,"mode":"manual"})");
  op.send(R"({"type":"cmd","seq":2,"steering":0.5,"power":0})");
  bool acked = false;
  for (int i = 0; i < 100 && !acked; ++i) {
    auto j = next_of_type(op, "telemetry");
    ASSERT_TRUE(j);
    if (!(*j)["ack"].is_null() && (*j)["ack"]["seq"] == 2) {
      acked = true;
      EXPECT_LE((*j)["ack"]["latency_steps"].get<int>(), 2);
      EXPECT_EQ((*j)["sample"]["mode"], 0);
    }
  }
  EXPECT_TRUE(acked);
}

TEST(Serve, BadFrameGetsErrorReply) {
  ServeRunner runner(loopback_config());
  Client op(runner.port());
  op.send("{nope");
  auto err = next_of_type(op, "error");
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["code"], "bad_json");
  EXPECT_TRUE((*err)["seq"].is_null());
}

TEST(Serve, SecondClientIsObserver) {
  ServeRunner runner(loopback_config());
  Client op(runner.port());
  ASSERT_TRUE(op.read());
  Client watcher(runner.port());
  ASSERT_TRUE(watcher.read());
  watcher.send(R"({"type":"mode","seq":1,"mode":"manual"})");
  auto err = next_of_type(watcher, "error");
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["code"], "read_only");
}

TEST(Serve, PausesWhenOperatorLeaves) {
  ServeRunner runner(loopback_config());
  {
    Client op(runner.port());
    auto j = next_of_type(op, "telemetry");
    ASSERT_TRUE(j);
    for (int i = 0; i < 10; ++i) op.read();
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  Client watcher(runner.port());  // becomes the new operator, resumes the session
  auto j = next_of_type(watcher, "telemetry");
  ASSERT_TRUE(j);
  EXPECT_GT((*j)["clock_s"].get<double>(), 0.0);
}

TEST(Replay, StreamsLogToClient) {
  std::vector<TelemetrySample> samples(40);
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].t = 0.01 * static_cast<double>(i);
  AppConfig cfg = loopback_config();
  cfg.serve.time_scale = 10.0;
  std::atomic<bool> stop{false};
  std::atomic<unsigned short> port{0};
  std::thread t([&] { replay_over_websocket(samples, cfg, stop, [&](unsigned short p) { port = p; }); });
  while (port.load() == 0) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  Client c(port.load());
  int frames = 0;
  double last_t = -1;
  while (auto text = c.read(std::chrono::milliseconds(1000))) {
    const auto j = json::parse(*text);
    EXPECT_EQ(protocol::validate_outbound(*text), "");
    EXPECT_GT(j["sample"]["t"].get<double>(), last_t);
    last_t = j["sample"]["t"].get<double>();
    ++frames;
    if (frames == 8) break;
  }
  t.join();
  EXPECT_EQ(frames, 8);  // 100 Hz log decimated to 20 Hz
}
