// Copyright 2026 The Virtual Force Teleop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "teleop/bridge.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <system_error>
#include <thread>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "teleop/config_text.hpp"
#include "teleop/protocol.hpp"
#include "teleop/trace.hpp"

namespace teleop {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::string bridge_hello(const Scenario& scenario, double stream_hz) {
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& h : scenario.world.half_spaces) {
    if (!h.visible) continue;
    obstacles.push_back({{"name", h.name},
                         {"normal", {h.normal.x(), h.normal.y(), h.normal.z()}},
                         {"offset", h.offset}});
  }
  const nlohmann::json j{{"type", "hello"},
                         {"scenario", scenario.name},
                         {"tick_rate", scenario.tick_rate},
                         {"stream_hz", stream_hz},
                         {"leader_dof", scenario.leader.dof()},
                         {"follower_dof", scenario.follower.dof()},
                         {"obstacles", obstacles}};
  return j.dump();
}

int stream_decimation(int tick_rate, double stream_hz) {
  if (!(stream_hz >= 30.0)) throw std::invalid_argument("bridge: stream_hz must be >= 30");
  if (stream_hz > tick_rate) return 1;
  return std::max(1, static_cast<int>(std::floor(tick_rate / stream_hz)));
}

class Bridge::Impl {
 public:
  class Session;

  Impl(const Scenario& scenario, const BridgeOptions& options)
      : scenario_(scenario),
        options_(options),
        decimation_(stream_decimation(scenario.tick_rate, options.stream_hz)),
        acceptor_(ioc_) {
    if (options.outbound_capacity < 2) throw std::invalid_argument("bridge: outbound_capacity must be >= 2");
    auto issues = validate_scenario(scenario_);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    hello_ = std::make_shared<const std::string>(bridge_hello(scenario_, options.stream_hz));
    try {
      const tcp::endpoint ep(asio::ip::make_address(options.address), options.port);
      acceptor_.open(ep.protocol());
      acceptor_.set_option(asio::socket_base::reuse_address(true));
      acceptor_.bind(ep);
      acceptor_.listen();
    } catch (const boost::system::system_error& e) {
      throw std::system_error(e.code().value(), std::generic_category(),
                              "bridge: cannot listen on " + options.address + ":" + std::to_string(options.port));
    }
    port_ = acceptor_.local_endpoint().port();
    do_accept();
    io_thread_ = std::thread([this] { ioc_.run(); });
  }

  ~Impl() {
    stop();
    asio::post(ioc_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
      close_current();
    });
    work_.reset();
    if (io_thread_.joinable()) io_thread_.join();
  }

  std::uint16_t port() const { return port_; }

  void stop() {
    std::lock_guard lk(mu_);
    stopping_ = true;
    cv_.notify_all();
  }

  void run();

  std::vector<TraceRecord> trace() const {
    std::lock_guard lk(mu_);
    return trace_;
  }

  BridgeStats stats() const {
    std::lock_guard lk(mu_);
    return stats_;
  }

  // io thread callbacks.
  void on_connect() {
    std::lock_guard lk(mu_);
    connected_ = true;
    ++stats_.clients_accepted;
  }
  void on_disconnect(const Session* s);
  void on_frame(std::span<const std::uint8_t> bytes);
  void on_dropped() {
    std::lock_guard lk(mu_);
    ++stats_.records_dropped;
  }
  std::size_t capacity() const { return options_.outbound_capacity; }
  std::shared_ptr<const std::string> hello() const { return hello_; }

 private:
  void do_accept();
  void close_current();
  void publish(std::shared_ptr<const std::string> msg);

  Scenario scenario_;
  BridgeOptions options_;
  int decimation_;
  std::shared_ptr<const std::string> hello_;

  asio::io_context ioc_;
  asio::executor_work_guard<asio::io_context::executor_type> work_ = asio::make_work_guard(ioc_);
  tcp::acceptor acceptor_;
  std::shared_ptr<Session> current_;  // io thread only
  std::thread io_thread_;
  std::uint16_t port_ = 0;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  bool connected_ = false;
  std::uint64_t disconnects_ = 0;
  std::optional<protocol::OperatorPose> latest_;
  std::deque<protocol::OperatorPose> replay_;
  BridgeStats stats_;
  std::vector<TraceRecord> trace_;
};

class Bridge::Impl::Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Impl& owner) : ws_(std::move(socket)), owner_(owner) {}

  void start() {
    ws_.async_accept(beast::bind_front_handler(&Session::on_accept, shared_from_this()));
  }

  void send(std::shared_ptr<const std::string> msg) {
    if (closed_ || !open_) return;
    if (queue_.size() >= owner_.capacity()) {
      // The front message may be mid-write; drop the oldest one after it.
      queue_.erase(queue_.begin() + (writing_ ? 1 : 0));
      owner_.on_dropped();
    }
    queue_.push_back(std::move(msg));
    if (!writing_) do_write();
  }

  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
    mark_closed();
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      mark_closed();
      return;
    }
    open_ = true;
    owner_.on_connect();
    send(owner_.hello());
    do_read();
  }

  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      mark_closed();
      return;
    }
    if (ws_.got_binary()) {
      const auto data = buffer_.cdata();
      owner_.on_frame({static_cast<const std::uint8_t*>(data.data()), data.size()});
    }
    buffer_.consume(buffer_.size());
    do_read();
  }

  void do_write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(*queue_.front()), beast::bind_front_handler(&Session::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) {
      mark_closed();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty() && !closed_) do_write();
  }

  void mark_closed() {
    if (closed_) return;
    closed_ = true;
    if (open_) owner_.on_disconnect(this);
  }

  websocket::stream<beast::tcp_stream> ws_;
  Impl& owner_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool writing_ = false;
  bool open_ = false;
  bool closed_ = false;
};

void Bridge::Impl::do_accept() {
  acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    close_current();
    current_ = std::make_shared<Session>(std::move(socket), *this);
    current_->start();
    spdlog::info("bridge: client connected");
    do_accept();
  });
}

void Bridge::Impl::close_current() {
  // Detached first so the close is not reported as a client disconnect.
  const auto old = std::move(current_);
  current_.reset();
  if (old) old->close();
}

void Bridge::Impl::on_disconnect(const Session* s) {
  if (s != current_.get()) return;  // replaced by a newer client
  spdlog::info("bridge: client disconnected");
  std::lock_guard lk(mu_);
  connected_ = false;
  ++disconnects_;
  cv_.notify_all();
}

void Bridge::Impl::on_frame(std::span<const std::uint8_t> bytes) {
  const auto r = protocol::decode(bytes);
  if (!r.ok()) {
    spdlog::debug("bridge: dropped frame ({})", protocol::to_string(r.error().kind));
    return;
  }
  const auto* pose = std::get_if<protocol::OperatorPose>(&r.message());
  if (pose == nullptr) return;
  std::lock_guard lk(mu_);
  ++stats_.poses_received;
  if (options_.pacing == BridgePacing::Lockstep) {
    replay_.push_back(*pose);
  } else {
    latest_ = *pose;
  }
  cv_.notify_all();
}

void Bridge::Impl::publish(std::shared_ptr<const std::string> msg) {
  {
    std::lock_guard lk(mu_);
    ++stats_.records_queued;
  }
  asio::post(ioc_, [this, msg = std::move(msg)]() mutable {
    if (current_) current_->send(std::move(msg));
  });
}

void Bridge::Impl::run() {
  TeleopSession session(scenario_);
  const double dt = scenario_.dt();
  const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(dt));
  auto next = std::chrono::steady_clock::now();
  std::uint64_t seen_disconnects = 0;
  std::optional<std::pair<Vec3, std::int64_t>> previous;  // last used position and its tick

  for (std::int64_t tick = 0; !options_.max_ticks || tick < *options_.max_ticks; ++tick) {
    std::optional<protocol::OperatorPose> pose;
    bool release = false;
    {
      std::unique_lock lk(mu_);
      if (options_.pacing == BridgePacing::Lockstep) {
        cv_.wait(lk, [&] { return stopping_ || !replay_.empty() || disconnects_ != seen_disconnects; });
        if (!replay_.empty()) {
          pose = replay_.front();
          replay_.pop_front();
        }
      } else if (latest_) {
        pose = latest_;
        latest_.reset();
      }
      if (stopping_) break;
      if (disconnects_ != seen_disconnects && !pose) {
        seen_disconnects = disconnects_;
        release = !connected_;
      }
    }

    std::optional<OperatorSample> sample;
    if (pose) {
      const Vec3 p(pose->position[0], pose->position[1], pose->position[2]);
      Quat q(pose->orientation[3], pose->orientation[0], pose->orientation[1], pose->orientation[2]);
      if (p.allFinite() && q.coeffs().allFinite() && q.norm() > 1e-9) {
        q.normalize();
        Vec3 v = Vec3::Zero();
        if (previous) v = (p - previous->first) / (static_cast<double>(tick - previous->second) * dt);
        previous = std::make_pair(p, tick);
        sample = OperatorSample{p, v, q};
      }
    }
    if (release) {
      session.release_operator();
      previous.reset();
    }
    const TraceRecord rec = session.step(sample);
    {
      std::lock_guard lk(mu_);
      trace_.push_back(rec);
    }
    if (tick % decimation_ == 0) {
      publish(std::make_shared<const std::string>("{\"type\":\"record\",\"record\":" +
                                                  to_ndjson(rec, TraceFields::Display) + "}"));
    }
    if (options_.pacing == BridgePacing::Realtime) {
      next += period;
      std::unique_lock lk(mu_);
      if (cv_.wait_until(lk, next, [&] { return stopping_; })) break;
    }
  }
}

Bridge::Bridge(const Scenario& scenario, const BridgeOptions& options)
    : impl_(std::make_unique<Impl>(scenario, options)) {}
Bridge::~Bridge() = default;
std::uint16_t Bridge::port() const { return impl_->port(); }
void Bridge::run() { impl_->run(); }
void Bridge::stop() { impl_->stop(); }
std::vector<TraceRecord> Bridge::trace() const { return impl_->trace(); }
BridgeStats Bridge::stats() const { return impl_->stats(); }

}  // namespace teleop
