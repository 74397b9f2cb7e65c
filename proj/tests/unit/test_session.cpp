#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/asio.hpp>

#include "asv/rpc_server.hpp"
#include "asv/scenario.hpp"
#include "asv/session.hpp"
#include "test_util.hpp"

using namespace asv;
namespace asio = boost::asio;
using asio::ip::tcp;

namespace {

SessionConfig basin_config(bool lockstep = true) {
  const auto doc = load_scenario_file(testutil::data_dir() / "scenarios" / "rl-fixed.yaml");
  return session_config_from(doc, lockstep);
}

Json reply(Session& s, const Json& request) { return Json::parse(handle_line(s, request.dump())); }

Json request(int id, const std::string& method, Json params = Json::object()) {
  return {{"id", id}, {"method", method}, {"params", std::move(params)}};
}

std::string error_code(const Json& r) { return r.at("error").at("code").get<std::string>(); }

// Blocking line client for the TCP tests.
class Client {
 public:
  explicit Client(std::uint16_t port) : socket_(io_) {
    socket_.connect({asio::ip::make_address("127.0.0.1"), port});
  }
  std::string read_line() {
    const std::size_t n = asio::read_until(socket_, buffer_, '\n');
    std::string line(asio::buffers_begin(buffer_.data()),
                     asio::buffers_begin(buffer_.data()) + static_cast<std::ptrdiff_t>(n) - 1);
    buffer_.consume(n);
    return line;
  }
  Json call(const std::string& raw) {
    asio::write(socket_, asio::buffer(raw + "\n"));
    return Json::parse(read_line());
  }

 private:
  asio::io_context io_;
  tcp::socket socket_;
  asio::streambuf buffer_;
};

}  // namespace

TEST(Base64, RoundTrip) {
  EXPECT_EQ(base64_encode({'M', 'a', 'n'}), "TWFu");
  EXPECT_EQ(base64_encode({'M', 'a'}), "TWE=");
  EXPECT_EQ(base64_encode({'M'}), "TQ==");
  EXPECT_EQ(base64_encode({}), "");
  std::vector<std::uint8_t> bytes;
  for (int i = 0; i < 1000; ++i) bytes.push_back(static_cast<std::uint8_t>((i * 37) & 0xff));
  for (std::size_t n : {0u, 1u, 2u, 3u, 998u, 1000u}) {
    const std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
    EXPECT_EQ(base64_decode(base64_encode(part)), part);
  }
}

TEST(Session, Handshake) {
  const Session s(basin_config());
  const Json h = s.handshake();
  EXPECT_EQ(h.at("protocol"), kProtocolName);
  EXPECT_EQ(h.at("version"), kProtocolVersion);
  EXPECT_EQ(h.at("mode"), "lockstep");
  EXPECT_EQ(h.at("observation_size"), 46);
  EXPECT_EQ(h.at("action_low"), Json::array({0.0, 0.4}));
  EXPECT_EQ(h.at("action_high"), Json::array({1.0, 0.6}));
}

TEST(Wire, StructuredErrorsKeepSession) {
  Session s(basin_config());
  const Json bad = Json::parse(handle_line(s, "{not json"));
  EXPECT_FALSE(bad.at("ok").get<bool>());
  EXPECT_EQ(error_code(bad), rpc_error::parse_error);
  EXPECT_TRUE(bad.at("id").is_null());

  EXPECT_EQ(error_code(Json::parse(handle_line(s, "[1, 2]"))), rpc_error::invalid_request);
  EXPECT_EQ(error_code(Json::parse(handle_line(s, R"({"id": 1})"))), rpc_error::invalid_request);

  const Json unknown = reply(s, request(7, "warp_drive"));
  EXPECT_EQ(error_code(unknown), rpc_error::unknown_method);
  EXPECT_EQ(unknown.at("id"), 7);

  EXPECT_EQ(error_code(reply(s, request(2, "set_current", {{"speed", "fast"}}))), rpc_error::invalid_params);
  EXPECT_EQ(error_code(reply(s, request(3, "env_step", {{"action", {0.5, 0.5}}}))),
            rpc_error::episode_finished);

  const Json ok = reply(s, request(4, "get_state"));
  EXPECT_TRUE(ok.at("ok").get<bool>());
  EXPECT_EQ(ok.at("id"), 4);
}

TEST(Wire, StringIdEchoed) {
  Session s(basin_config());
  const Json r = Json::parse(handle_line(s, R"({"id": "abc", "method": "get_state"})"));
  EXPECT_EQ(r.at("id"), "abc");
}

TEST(Session, SimStepZeroKeepsTime) {
  Session s(basin_config());
  const Json r = reply(s, request(1, "sim_step", {{"n", 0}}));
  ASSERT_TRUE(r.at("ok").get<bool>()) << r.dump();
  EXPECT_EQ(r.at("result").at("t"), 0.0);
  EXPECT_EQ(reply(s, request(2, "get_state")).at("result").at("t"), 0.0);
  EXPECT_EQ(error_code(reply(s, request(3, "sim_step", {{"n", -1}}))), rpc_error::invalid_params);
  EXPECT_EQ(error_code(reply(s, request(4, "sim_step", {{"n", 1.5}}))), rpc_error::invalid_params);
}

TEST(Session, ControlsAppliedAndThrustMoves) {
  Session s(basin_config());
  const Json r = reply(s, request(1, "set_vessel_controls", {{"thrust", 0.8}, {"angle", 0.5}}));
  ASSERT_TRUE(r.at("ok").get<bool>()) << r.dump();
  EXPECT_EQ(r.at("result").at("applied")[0].at("thrust"), 0.8);
  reply(s, request(2, "sim_step", {{"n", 250}}));
  const Json st = reply(s, request(3, "get_state")).at("result");
  EXPECT_NEAR(st.at("t").get<double>(), 5.0, 1e-9);
  EXPECT_GT(st.at("pose").at("x").get<double>(), 0.5);
  EXPECT_EQ(st.at("controls")[0].at("thrust"), 0.8);
}

TEST(Session, CurrentCausesLateralDrift) {
  Session s(basin_config());
  const Json c = reply(s, request(1, "set_current", {{"speed", 0.5}, {"heading", 135.0 * kPi / 180.0}}));
  ASSERT_TRUE(c.at("ok").get<bool>()) << c.dump();
  // Earth velocity is continuous across the change: still at rest.
  const Json at_change = reply(s, request(2, "get_state")).at("result");
  EXPECT_NEAR(at_change.at("nu").at("u").get<double>(), 0.0, 1e-12);
  reply(s, request(3, "set_vessel_controls", {{"thrust", 0.5}}));
  reply(s, request(4, "sim_step", {{"n", 1500}}));
  const Json st = reply(s, request(5, "get_state")).at("result");
  EXPECT_GT(std::abs(st.at("pose").at("y").get<double>()), 1.0);
}

TEST(Session, EpisodeModeRules) {
  Session s(basin_config());
  const Json reset = reply(s, request(1, "env_reset", {{"seed", 3}}));
  ASSERT_TRUE(reset.at("ok").get<bool>()) << reset.dump();
  EXPECT_EQ(reset.at("result").at("observation").size(), 46u);
  EXPECT_EQ(error_code(reply(s, request(2, "sim_step"))), rpc_error::mode_violation);
  const Json step = reply(s, request(3, "env_step", {{"action", {0.6, 0.5}}}));
  ASSERT_TRUE(step.at("ok").get<bool>()) << step.dump();
  EXPECT_EQ(step.at("result").at("info").at("steps"), 1);
  EXPECT_EQ(error_code(reply(s, request(4, "env_step", {{"action", {0.6}}}))), rpc_error::invalid_params);
}

TEST(Session, RealtimeRejectsSimStep) {
  Session s(basin_config(false));
  EXPECT_EQ(s.handshake().at("mode"), "realtime");
  EXPECT_EQ(error_code(reply(s, request(1, "sim_step"))), rpc_error::mode_violation);
  const double t0 = s.snapshot()->state.t;
  s.tick();
  EXPECT_NEAR(s.snapshot()->state.t, t0 + s.dt(), 1e-15);
}

TEST(Session, ScanAndRadarQueries) {
  Session s(basin_config());
  const Json scan = reply(s, request(1, "get_scan", {{"n_beams", 90}, {"max_range", 200.0}})).at("result");
  EXPECT_EQ(scan.at("ranges").size(), 90u);
  const auto direct = raycast_scan(*s.snapshot()->world, {}, 90, 200.0);
  for (std::size_t i = 0; i < 90; ++i) EXPECT_EQ(scan.at("ranges")[i].get<double>(), direct.ranges[i]);

  const Json radar = reply(s, request(2, "get_radar", {{"n_beams", 180}, {"max_range", 150.0}}));
  ASSERT_TRUE(radar.at("ok").get<bool>()) << radar.dump();
  const auto& r = radar.at("result");
  const int size = r.at("size").get<int>();
  const auto pixels = base64_decode(r.at("pixels").get<std::string>());
  EXPECT_EQ(pixels.size(), static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  EXPECT_GT(std::count(pixels.begin(), pixels.end(), 1), 0);
}

TEST(Session, PcgGenerateLoadsWorld) {
  Session s(basin_config());
  const Json r = reply(s, request(1, "pcg_generate", {{"seed", 4}, {"n_segments", 3}, {"load", true}}));
  ASSERT_TRUE(r.at("ok").get<bool>()) << r.dump();
  EXPECT_EQ(r.at("result").at("n_segments"), 3);
  EXPECT_TRUE(r.at("result").at("loaded").get<bool>());
  EXPECT_EQ(s.snapshot()->world->goal().x, r.at("result").at("goal")[0].get<double>());
}

TEST(Session, WireMatchesInProcessBitForBit) {
  Session wire(basin_config());
  RlEnvironment env(basin_config().world, basin_config().vessel, basin_config().env);
  const Json r0 = reply(wire, request(0, "env_reset", {{"seed", 0}}));
  auto obs = env.reset(0);
  ASSERT_EQ(r0.at("result").at("observation").get<std::vector<double>>(), obs.flatten());
  const Policy policy = scripted_policy();
  for (int k = 0; k < 40 && !env.done(); ++k) {
    const ActionSpec a = policy(obs, env);
    const Json r = reply(wire, request(k + 1, "env_step", {{"action", {a.thrust, a.angle}}}));
    const StepResult local = env.step(a);
    ASSERT_EQ(r.at("result").at("observation").get<std::vector<double>>(), local.obs.flatten()) << k;
    ASSERT_EQ(r.at("result").at("reward").get<double>(), local.reward) << k;
    obs = local.obs;
  }
}

TEST(Server, TcpRoundTrip) {
  RpcServer server(basin_config(), {});
  server.start();
  ASSERT_NE(server.port(), 0);
  {
    Client c(server.port());
    const Json banner = Json::parse(c.read_line());
    EXPECT_EQ(banner.at("protocol"), kProtocolName);
    EXPECT_EQ(error_code(c.call("garbage")), rpc_error::parse_error);
    EXPECT_EQ(error_code(c.call(request(1, "nope").dump())), rpc_error::unknown_method);
    const Json reset = c.call(request(2, "env_reset", {{"seed", 0}}).dump());
    EXPECT_TRUE(reset.at("ok").get<bool>());
    const Json step = c.call(request(3, "env_step", {{"action", {0.6, 0.5}}}).dump());
    EXPECT_TRUE(step.at("ok").get<bool>()) << step.dump();
    const Json bye = c.call(request(4, "shutdown").dump());
    EXPECT_TRUE(bye.at("ok").get<bool>());
  }
  server.wait();
}

TEST(Server, SecondServerOnSamePortFailsToBind) {
  RpcServer a(basin_config(), {});
  a.start();
  ServerConfig cfg;
  cfg.port = a.port();
  RpcServer b(basin_config(), cfg);
  try {
    b.start();
    ADD_FAILURE() << "second bind succeeded";
  } catch (const RuntimeFailure& e) {
    EXPECT_EQ(e.code(), "bind-failed");
  }
  a.stop();
  a.wait();
}
