#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covspec/codec.hpp"
#include "covspec/payload.hpp"

namespace covspec {

/// Monotone modeled clock with an ordered event queue. Events due at the same
/// time are delivered in scheduling order.
class VirtualClock {
 public:
  struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    Message msg;
    std::size_t frame_bytes = 0;
  };

  double now() const noexcept { return now_; }
  void advance(double dt);
  /// Moves to max(now, t).
  void advance_to(double t) noexcept;

  void schedule(double at, Message msg, std::size_t frame_bytes = 0);
  std::optional<double> next_time() const;
  /// Earliest event with time <= now, if any.
  std::optional<Event> pop_due();
  /// Earliest event, advancing the clock to its time.
  std::optional<Event> pop_next();
  std::size_t pending() const noexcept { return events_.size(); }

 private:
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::deque<Event> events_;  // sorted by (time, seq)
};

/// Channel latency per direction plus edge compute time.
struct LinkTiming {
  ChannelConfig channel;
  PayloadConfig payload;
  double edge_round_s = 0.12;

  double uplink_s(const Message& m) const { return latency(payload_bits(m, payload), channel); }
  double downlink_s(const Message& m) const { return latency(payload_bits(m, payload), channel); }
};

struct Delivery {
  Message msg;
  double arrival_s = 0.0;
  std::size_t frame_bytes = 0;
};

/// Edge-side request handler; one reply per request.
class EdgeService {
 public:
  virtual ~EdgeService() = default;
  virtual Message handle(const Message& request) = 0;
};

/// Device end of a session. At most one request may be in flight.
class DeviceLink {
 public:
  virtual ~DeviceLink() = default;

  /// Sends a request at device time `now_s`; returns the frame size.
  virtual std::size_t send(const Message& msg, double now_s) = 0;
  /// The reply, if its modeled arrival time is <= now_s. Non-blocking with
  /// respect to modeled time.
  virtual std::optional<Delivery> poll(double now_s) = 0;
  /// The reply, whenever it arrives.
  virtual Delivery recv() = 0;
  virtual void close() = 0;
};

/// In-process link. The edge handler runs at send time; its reply is stamped
/// with the modeled arrival time. Every message passes through the codec.
class LoopbackLink final : public DeviceLink {
 public:
  LoopbackLink(EdgeService& edge, LinkTiming timing);

  std::size_t send(const Message& msg, double now_s) override;
  std::optional<Delivery> poll(double now_s) override;
  Delivery recv() override;
  void close() override { closed_ = true; }

  const VirtualClock& clock() const noexcept { return clock_; }

 private:
  EdgeService& edge_;
  LinkTiming timing_;
  VirtualClock clock_;
  bool closed_ = false;
  bool in_flight_ = false;
};

inline constexpr std::uint32_t kProtocolVersion = 1;
inline constexpr std::size_t kHelloBytes = 16;

struct Hello {
  std::uint32_t version = kProtocolVersion;
  std::uint32_t vocab_size = 0;
  std::uint64_t config_hash = 0;

  std::array<std::uint8_t, kHelloBytes> encode() const;
  static Hello decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const Hello&, const Hello&) = default;
};

/// Connected stream socket carrying codec frames.
class FrameStream {
 public:
  explicit FrameStream(int fd, double timeout_s);
  ~FrameStream();
  FrameStream(FrameStream&& other) noexcept;
  FrameStream& operator=(FrameStream&& other) noexcept;
  FrameStream(const FrameStream&) = delete;
  FrameStream& operator=(const FrameStream&) = delete;

  void write_all(std::span<const std::uint8_t> bytes);
  /// Reads exactly n bytes. Throws kSessionClosed on EOF before the first
  /// byte when `eof_ok`, kFrameError on EOF mid-read, kTransportTimeout.
  std::vector<std::uint8_t> read_exact(std::size_t n, bool eof_ok);

  std::size_t write_frame(const Message& msg);
  /// Returns the decoded message and the frame size in bytes.
  std::pair<Message, std::size_t> read_frame();

  void exchange_hello(const Hello& mine, bool send_first);
  void close() noexcept;
  bool is_open() const noexcept { return fd_ >= 0; }

 private:
  int fd_ = -1;
  double timeout_s_;
};

/// Device end over TCP. Modeled arrival time is computed from the payload of
/// both directions, so results match the loopback link.
class SocketDeviceLink final : public DeviceLink {
 public:
  /// Connects, retrying until `connect_timeout_s`, then exchanges hellos.
  static std::unique_ptr<SocketDeviceLink> connect(const std::string& host, std::uint16_t port,
                                                   const Hello& hello, LinkTiming timing,
                                                   double connect_timeout_s,
                                                   double io_timeout_s);

  std::size_t send(const Message& msg, double now_s) override;
  std::optional<Delivery> poll(double now_s) override;
  Delivery recv() override;
  void close() override { stream_.close(); }

 private:
  SocketDeviceLink(FrameStream stream, LinkTiming timing);
  Delivery read_reply();

  FrameStream stream_;
  LinkTiming timing_;
  double sent_at_ = 0.0;
  double uplink_s_ = 0.0;
  bool in_flight_ = false;
  std::optional<Delivery> buffered_;
};

/// Single-session TCP server for the edge role.
class EdgeServer {
 public:
  /// Binds and listens on `port` (0 picks an ephemeral port).
  EdgeServer(const std::string& bind_host, std::uint16_t port);
  ~EdgeServer();
  EdgeServer(const EdgeServer&) = delete;
  EdgeServer& operator=(const EdgeServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  /// Accepts one device, checks its hello against `hello`, and serves
  /// requests until the device closes. Returns the number of requests served.
  std::size_t serve_one(EdgeService& service, const Hello& hello, double accept_timeout_s,
                        double io_timeout_s);

 private:
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace covspec
