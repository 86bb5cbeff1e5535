#include "covspec/error.hpp"
#include "covspec/transport.hpp"

namespace covspec {

LoopbackLink::LoopbackLink(EdgeService& edge, LinkTiming timing) : edge_(edge), timing_(timing) {}

std::size_t LoopbackLink::send(const Message& msg, double now_s) {
  if (closed_) fail(Errc::kSessionClosed, "loopback session closed");
  if (in_flight_) fail(Errc::kProtocolFault, "a verification request is already in flight");
  clock_.advance_to(now_s);

  const auto request_frame = encode_message(msg);
  const Message request = decode_message(request_frame);
  const double at_edge = clock_.now() + timing_.uplink_s(request);

  const Message reply = edge_.handle(request);
  const auto reply_frame = encode_message(reply);
  Message delivered = decode_message(reply_frame);
  const double arrival = at_edge + timing_.edge_round_s + timing_.downlink_s(delivered);
  clock_.schedule(arrival, std::move(delivered), reply_frame.size());
  in_flight_ = true;
  return request_frame.size();
}

std::optional<Delivery> LoopbackLink::poll(double now_s) {
  if (closed_) fail(Errc::kSessionClosed, "loopback session closed");
  const auto due = clock_.next_time();
  if (!due || *due > now_s) return std::nullopt;
  auto ev = clock_.pop_next();
  in_flight_ = false;
  return Delivery{std::move(ev->msg), ev->time, ev->frame_bytes};
}

Delivery LoopbackLink::recv() {
  if (closed_) fail(Errc::kSessionClosed, "loopback session closed");
  auto ev = clock_.pop_next();
  if (!ev) fail(Errc::kSessionClosed, "no reply pending on loopback link");
  in_flight_ = false;
  return Delivery{std::move(ev->msg), ev->time, ev->frame_bytes};
}

}  // namespace covspec
