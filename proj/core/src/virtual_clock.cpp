#include "covspec/transport.hpp"

#include <algorithm>
#include <cmath>

#include "covspec/error.hpp"

namespace covspec {

void VirtualClock::advance(double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) fail(Errc::kProtocolFault, "clock cannot move backward");
  now_ += dt;
}

void VirtualClock::advance_to(double t) noexcept { now_ = std::max(now_, t); }

void VirtualClock::schedule(double at, Message msg, std::size_t frame_bytes) {
  if (at < now_) fail(Errc::kProtocolFault, "event scheduled in the past");
  Event ev{at, next_seq_++, std::move(msg), frame_bytes};
  auto pos = std::upper_bound(events_.begin(), events_.end(), ev, [](const Event& a, const Event& b) {
    return a.time < b.time || (a.time == b.time && a.seq < b.seq);
  });
  events_.insert(pos, std::move(ev));
}

std::optional<double> VirtualClock::next_time() const {
  if (events_.empty()) return std::nullopt;
  return events_.front().time;
}

std::optional<VirtualClock::Event> VirtualClock::pop_due() {
  if (events_.empty() || events_.front().time > now_) return std::nullopt;
  Event ev = std::move(events_.front());
  events_.pop_front();
  return ev;
}

std::optional<VirtualClock::Event> VirtualClock::pop_next() {
  if (events_.empty()) return std::nullopt;
  advance_to(events_.front().time);
  return pop_due();
}

}  // namespace covspec
