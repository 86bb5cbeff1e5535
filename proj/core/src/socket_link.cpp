#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>
#include <thread>

#include "covspec/error.hpp"
#include "covspec/transport.hpp"

namespace covspec {

namespace {

int timeout_ms(double seconds) {
  if (seconds <= 0.0) return -1;
  return static_cast<int>(seconds * 1000.0 + 0.5);
}

void wait_readable(int fd, double timeout_s) {
  pollfd p{fd, POLLIN, 0};
  for (;;) {
    const int rc = ::poll(&p, 1, timeout_ms(timeout_s));
    if (rc > 0) return;
    if (rc == 0) fail(Errc::kTransportTimeout, "timed out waiting for peer");
    if (errno != EINTR) fail(Errc::kTransportError, std::string("poll: ") + std::strerror(errno));
  }
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

std::array<std::uint8_t, kHelloBytes> Hello::encode() const {
  std::array<std::uint8_t, kHelloBytes> out{};
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(version >> (8 * i));
  for (int i = 0; i < 4; ++i) out[4 + i] = static_cast<std::uint8_t>(vocab_size >> (8 * i));
  for (int i = 0; i < 8; ++i) out[8 + i] = static_cast<std::uint8_t>(config_hash >> (8 * i));
  return out;
}

Hello Hello::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kHelloBytes) fail(Errc::kFrameError, "hello must be 16 bytes");
  Hello h{0, 0, 0};
  for (int i = 0; i < 4; ++i) h.version |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  for (int i = 0; i < 4; ++i) h.vocab_size |= static_cast<std::uint32_t>(bytes[4 + i]) << (8 * i);
  for (int i = 0; i < 8; ++i) h.config_hash |= static_cast<std::uint64_t>(bytes[8 + i]) << (8 * i);
  return h;
}

FrameStream::FrameStream(int fd, double timeout_s) : fd_(fd), timeout_s_(timeout_s) {}

FrameStream::~FrameStream() { close(); }

FrameStream::FrameStream(FrameStream&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), timeout_s_(other.timeout_s_) {}

FrameStream& FrameStream::operator=(FrameStream&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    timeout_s_ = other.timeout_s_;
  }
  return *this;
}

void FrameStream::close() noexcept {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

void FrameStream::write_all(std::span<const std::uint8_t> bytes) {
  if (fd_ < 0) fail(Errc::kSessionClosed, "stream closed");
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET) fail(Errc::kSessionClosed, "peer closed the session");
      fail(Errc::kTransportError, std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::vector<std::uint8_t> FrameStream::read_exact(std::size_t n, bool eof_ok) {
  if (fd_ < 0) fail(Errc::kSessionClosed, "stream closed");
  std::vector<std::uint8_t> buf(n);
  std::size_t got = 0;
  while (got < n) {
    wait_readable(fd_, timeout_s_);
    const ssize_t r = ::recv(fd_, buf.data() + got, n - got, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) fail(Errc::kSessionClosed, "peer reset the session");
      fail(Errc::kTransportError, std::string("recv: ") + std::strerror(errno));
    }
    if (r == 0) {
      if (got == 0 && eof_ok) fail(Errc::kSessionClosed, "peer closed the session");
      fail(Errc::kFrameError, "peer closed mid-frame");
    }
    got += static_cast<std::size_t>(r);
  }
  return buf;
}

std::size_t FrameStream::write_frame(const Message& msg) {
  const auto frame = encode_message(msg);
  write_all(frame);
  return frame.size();
}

std::pair<Message, std::size_t> FrameStream::read_frame() {
  auto frame = read_exact(kFrameHeaderBytes, true);
  const FrameHeader h = decode_header(frame);
  const auto body = read_exact(h.body_length, false);
  frame.insert(frame.end(), body.begin(), body.end());
  return {decode_message(frame), frame.size()};
}

void FrameStream::exchange_hello(const Hello& mine, bool send_first) {
  const auto out = mine.encode();
  if (send_first) write_all(out);
  const auto in = read_exact(kHelloBytes, true);
  if (!send_first) write_all(out);
  const Hello theirs = Hello::decode(in);
  if (!(theirs == mine)) {
    close();
    fail(Errc::kConfigMismatch,
         "peer hello (version " + std::to_string(theirs.version) + ", vocab " +
             std::to_string(theirs.vocab_size) + ") does not match local configuration");
  }
}

SocketDeviceLink::SocketDeviceLink(FrameStream stream, LinkTiming timing)
    : stream_(std::move(stream)), timing_(timing) {}

std::unique_ptr<SocketDeviceLink> SocketDeviceLink::connect(const std::string& host,
                                                            std::uint16_t port, const Hello& hello,
                                                            LinkTiming timing,
                                                            double connect_timeout_s,
                                                            double io_timeout_s) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    fail(Errc::kTransportError, "cannot resolve " + host + ": " + ::gai_strerror(rc));
  }

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(connect_timeout_s);
  int fd = -1;
  for (;;) {
    for (addrinfo* ai = res; ai != nullptr && fd < 0; ai = ai->ai_next) {
      const int s = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (s < 0) continue;
      if (::connect(s, ai->ai_addr, ai->ai_addrlen) == 0) {
        fd = s;
      } else {
        ::close(s);
      }
    }
    if (fd >= 0 || std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    fail(Errc::kTransportTimeout, "could not connect to " + host + ":" + service);
  }
  set_nodelay(fd);
  FrameStream stream(fd, io_timeout_s);
  stream.exchange_hello(hello, /*send_first=*/true);
  return std::unique_ptr<SocketDeviceLink>(new SocketDeviceLink(std::move(stream), timing));
}

std::size_t SocketDeviceLink::send(const Message& msg, double now_s) {
  if (in_flight_) fail(Errc::kProtocolFault, "a verification request is already in flight");
  const std::size_t bytes = stream_.write_frame(msg);
  sent_at_ = now_s;
  uplink_s_ = timing_.uplink_s(msg);
  in_flight_ = true;
  return bytes;
}

Delivery SocketDeviceLink::read_reply() {
  auto [msg, bytes] = stream_.read_frame();
  const double arrival = sent_at_ + uplink_s_ + timing_.edge_round_s + timing_.downlink_s(msg);
  return Delivery{std::move(msg), arrival, bytes};
}

std::optional<Delivery> SocketDeviceLink::poll(double now_s) {
  if (!in_flight_) return std::nullopt;
  // Modeled time decides readiness, so the frame must be on hand first.
  if (!buffered_) buffered_ = read_reply();
  if (buffered_->arrival_s > now_s) return std::nullopt;
  in_flight_ = false;
  Delivery d = std::move(*buffered_);
  buffered_.reset();
  return d;
}

Delivery SocketDeviceLink::recv() {
  if (!in_flight_) fail(Errc::kProtocolFault, "no request in flight");
  if (!buffered_) buffered_ = read_reply();
  in_flight_ = false;
  Delivery d = std::move(*buffered_);
  buffered_.reset();
  return d;
}

EdgeServer::EdgeServer(const std::string& bind_host, std::uint16_t port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) fail(Errc::kTransportError, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    fail(Errc::kTransportError, "invalid bind address " + bind_host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 1) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    fail(Errc::kTransportError, "cannot listen on port " + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

EdgeServer::~EdgeServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

std::size_t EdgeServer::serve_one(EdgeService& service, const Hello& hello,
                                  double accept_timeout_s, double io_timeout_s) {
  wait_readable(listen_fd_, accept_timeout_s);
  const int fd = ::accept(listen_fd_, nullptr, nullptr);
  if (fd < 0) fail(Errc::kTransportError, std::string("accept: ") + std::strerror(errno));
  set_nodelay(fd);
  FrameStream stream(fd, io_timeout_s);
  stream.exchange_hello(hello, /*send_first=*/false);

  std::size_t served = 0;
  for (;;) {
    Message request;
    try {
      request = stream.read_frame().first;
    } catch (const Error& e) {
      if (e.code() == Errc::kSessionClosed) break;
      throw;
    }
    stream.write_frame(service.handle(request));
    ++served;
  }
  return served;
}

}  // namespace covspec
