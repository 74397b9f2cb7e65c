#include "asv/rpc_server.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <variant>

#include <boost/asio.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace asv {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxLine = 1 << 20;

std::string ok_line(const Json& id, Json result) {
  return Json{{"id", id}, {"ok", true}, {"result", std::move(result)}}.dump();
}

std::string error_line(const Json& id, const std::string& code, const std::string& message) {
  return Json{{"id", id}, {"ok", false}, {"error", {{"code", code}, {"message", message}}}}.dump();
}

struct Request {
  Json id;
  std::string method;
  Json params = Json::object();
};

/// Parses a line; on failure returns the error response instead.
std::variant<Request, std::string> parse_request(const std::string& line) {
  Json doc = Json::parse(line, nullptr, false);
  if (doc.is_discarded()) return error_line(nullptr, rpc_error::parse_error, "line is not valid JSON");
  if (!doc.is_object()) return error_line(nullptr, rpc_error::invalid_request, "request must be an object");
  Request r;
  if (doc.contains("id")) r.id = doc["id"];
  if (!doc.contains("method") || !doc["method"].is_string()) {
    return error_line(r.id, rpc_error::invalid_request, "request needs a string 'method'");
  }
  r.method = doc["method"].get<std::string>();
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) return error_line(r.id, rpc_error::invalid_request, "'params' must be an object");
    r.params = doc["params"];
  }
  return r;
}

std::string wire_code(const Error& e) {
  if (e.code() == "mode-violation") return rpc_error::mode_violation;
  if (e.code() == "episode-finished") return rpc_error::episode_finished;
  if (e.code() == "unconfigured") return rpc_error::unconfigured;
  if (dynamic_cast<const ValidationError*>(&e)) return rpc_error::invalid_params;
  return rpc_error::internal;
}

// Runs a method with every failure mapped to an in-band error response.
std::string execute(const Request& r, const std::function<Json()>& run) {
  try {
    return ok_line(r.id, run());
  } catch (const std::out_of_range&) {
    return error_line(r.id, rpc_error::unknown_method, fmt::format("unknown method '{}'", r.method));
  } catch (const Error& e) {
    return error_line(r.id, wire_code(e), e.what());
  } catch (const std::exception& e) {
    return error_line(r.id, rpc_error::internal, e.what());
  }
}

}  // namespace

std::string handle_line(Session& session, const std::string& line) {
  auto parsed = parse_request(line);
  if (auto* err = std::get_if<std::string>(&parsed)) return *err;
  const Request& r = std::get<Request>(parsed);
  if (Session::is_query(r.method)) {
    return execute(r, [&] { return Session::query(*session.snapshot(), r.method, r.params); });
  }
  if (r.method == "shutdown") return ok_line(r.id, Json::object());
  return execute(r, [&] { return session.call(r.method, r.params); });
}

struct RpcServer::Impl {
  struct Job {
    Request request;
    std::function<void(std::string)> done;
  };

  class Connection : public std::enable_shared_from_this<Connection> {
   public:
    Connection(tcp::socket socket, Impl* server)
        : socket_(std::move(socket)), buffer_(kMaxLine), server_(server) {}

    void start() { write(server_->session.handshake().dump()); }

    void respond(std::string line) {
      asio::post(server_->io, [self = shared_from_this(), line = std::move(line)]() mutable {
        self->write(std::move(line));
      });
    }

   private:
    void write(std::string line) {
      out_ = std::move(line);
      out_.push_back('\n');
      asio::async_write(socket_, asio::buffer(out_),
                        [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                          if (ec) return;
                          if (self->closing_) {
                            boost::system::error_code ignore;
                            self->socket_.shutdown(tcp::socket::shutdown_both, ignore);
                            return;
                          }
                          self->read();
                        });
    }

    void read() {
      asio::async_read_until(
          socket_, buffer_, '\n', [self = shared_from_this()](boost::system::error_code ec, std::size_t n) {
            if (ec == asio::error::not_found) {
              self->closing_ = true;
              self->write(error_line(nullptr, rpc_error::invalid_request, "line too long"));
              return;
            }
            if (ec) return;  // disconnect; the session is untouched
            std::string line(asio::buffers_begin(self->buffer_.data()),
                             asio::buffers_begin(self->buffer_.data()) + static_cast<std::ptrdiff_t>(n));
            self->buffer_.consume(n);
            while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
            if (line.empty()) {
              self->read();
              return;
            }
            self->server_->dispatch(self, line);
          });
    }

    tcp::socket socket_;
    asio::streambuf buffer_;
    Impl* server_;
    std::string out_;
    bool closing_ = false;
  };

  Impl(SessionConfig s, ServerConfig c) : session(std::move(s)), config(std::move(c)), acceptor(io) {}

  void dispatch(const std::shared_ptr<Connection>& conn, const std::string& line) {
    auto parsed = parse_request(line);
    if (auto* err = std::get_if<std::string>(&parsed)) {
      conn->respond(*err);
      return;
    }
    Request r = std::get<Request>(std::move(parsed));
    if (Session::is_query(r.method)) {
      const auto snap = session.snapshot();
      conn->respond(execute(r, [&] { return Session::query(*snap, r.method, r.params); }));
      return;
    }
    if (r.method == "shutdown") {
      conn->respond(ok_line(r.id, Json::object()));
      request_stop();
      return;
    }
    std::lock_guard lock(mutex);
    jobs.push_back({std::move(r), [conn](std::string resp) { conn->respond(std::move(resp)); }});
    cv.notify_all();
  }

  void accept() {
    acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Connection>(std::move(socket), this)->start();
      accept();
    });
  }

  // Single simulation authority: every mutation runs here, in arrival order.
  void authority_loop() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(session.dt() / config.realtime_factor));
    auto next_tick = clock::now() + period;
    std::unique_lock lock(mutex);
    while (!stopping) {
      if (jobs.empty()) {
        if (session.lockstep()) {
          cv.wait(lock, [&] { return stopping || !jobs.empty(); });
        } else {
          cv.wait_until(lock, next_tick, [&] { return stopping || !jobs.empty(); });
          if (!stopping && jobs.empty() && clock::now() >= next_tick) {
            lock.unlock();
            session.tick();
            lock.lock();
            next_tick += period;
          }
        }
        continue;
      }
      Job job = std::move(jobs.front());
      jobs.pop_front();
      lock.unlock();
      job.done(execute(job.request, [&] { return session.call(job.request.method, job.request.params); }));
      lock.lock();
    }
  }

  void request_stop() {
    std::lock_guard lock(mutex);
    stop_requested = true;
    stop_cv.notify_all();
  }

  Session session;
  ServerConfig config;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::thread net_thread;
  std::thread authority_thread;
  std::mutex mutex;
  std::condition_variable cv;
  std::condition_variable stop_cv;
  std::deque<Job> jobs;
  bool stopping = false;
  bool stop_requested = false;
  bool started = false;
};

RpcServer::RpcServer(SessionConfig session, ServerConfig config)
    : impl_(std::make_unique<Impl>(std::move(session), std::move(config))) {
  if (!(impl_->config.realtime_factor > 0.0)) throw ValidationError("server: realtime_factor must be > 0");
}

RpcServer::~RpcServer() { stop(); }

void RpcServer::start() {
  auto& im = *impl_;
  try {
    const tcp::endpoint ep(asio::ip::make_address(im.config.host), im.config.port);
    im.acceptor.open(ep.protocol());
    im.acceptor.set_option(tcp::acceptor::reuse_address(true));
    im.acceptor.bind(ep);
    im.acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw RuntimeFailure("bind-failed", fmt::format("cannot bind {}:{}: {}", im.config.host,
                                                     im.config.port, e.what()));
  }
  im.accept();
  im.started = true;
  im.net_thread = std::thread([&im] { im.io.run(); });
  im.authority_thread = std::thread([&im] { im.authority_loop(); });
  spdlog::info("rpc: listening on {}:{} ({})", im.config.host, port(),
               im.session.lockstep() ? "lockstep" : "realtime");
}

void RpcServer::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stop_cv.wait(lock, [&] { return impl_->stop_requested; });
  lock.unlock();
  // Give the shutdown reply a moment to leave before the io loop stops.
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  stop();
}

void RpcServer::stop() {
  auto& im = *impl_;
  if (!im.started) return;
  {
    std::lock_guard lock(im.mutex);
    im.stopping = true;
    im.stop_requested = true;
    im.cv.notify_all();
    im.stop_cv.notify_all();
  }
  im.io.stop();
  if (im.net_thread.joinable()) im.net_thread.join();
  if (im.authority_thread.joinable()) im.authority_thread.join();
  im.started = false;
}

std::uint16_t RpcServer::port() const { return impl_->acceptor.local_endpoint().port(); }

}  // namespace asv
