// Newline-delimited JSON request/response service over TCP.
//
// Request:  {"id": <any>, "method": "<name>", "params": {...}}
// Response: {"id": <echo>, "ok": true,  "result": {...}}
//           {"id": <echo>, "ok": false, "error": {"code": "...", "message": "..."}}
//
// The first line a client receives is a handshake banner carrying the protocol
// name and version, the stepping mode and the RL space descriptors.
#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "asv/session.hpp"

namespace asv {

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  /// Realtime mode only: simulated seconds per wall-clock second.
  double realtime_factor = 1.0;
};

/// Wire error codes.
namespace rpc_error {
inline constexpr const char* parse_error = "parse-error";
inline constexpr const char* invalid_request = "invalid-request";
inline constexpr const char* unknown_method = "unknown-method";
inline constexpr const char* invalid_params = "invalid-params";
inline constexpr const char* mode_violation = "mode-violation";
inline constexpr const char* episode_finished = "episode-finished";
inline constexpr const char* unconfigured = "unconfigured";
inline constexpr const char* internal = "internal";
}  // namespace rpc_error

/// Processes one request line against a session and returns the response
/// line (without the trailing newline). Used by the server and by tests.
std::string handle_line(Session& session, const std::string& line);

class RpcServer {
 public:
  RpcServer(SessionConfig session, ServerConfig config);
  ~RpcServer();
  RpcServer(const RpcServer&) = delete;
  RpcServer& operator=(const RpcServer&) = delete;

  /// Binds and starts the network and authority threads. Throws
  /// RuntimeFailure("bind-failed") if the address cannot be bound.
  void start();
  /// Blocks until a client calls "shutdown" or stop() is called.
  void wait();
  void stop();
  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace asv
