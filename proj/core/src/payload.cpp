#include "covspec/payload.hpp"

#include <cmath>

#include "covspec/error.hpp"

namespace covspec {

void PayloadConfig::validate() const {
  if (b_id == 0 || b_logit == 0 || b_logit_tar == 0 || b_acc == 0 || b_bonus == 0 || b_rej == 0) {
    fail(Errc::kConfigError, "payload bit widths must be positive");
  }
}

void ChannelConfig::validate() const {
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
    fail(Errc::kInvalidChannel, "bandwidth must be positive");
  }
  if (!std::isfinite(snr_db)) fail(Errc::kInvalidChannel, "SNR must be finite");
}

double ChannelConfig::capacity_bps() const {
  validate();
  return bandwidth_hz * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

std::uint64_t uplink_bits(std::size_t n_draft, std::size_t n_gated, const PayloadConfig& cfg) {
  return static_cast<std::uint64_t>(n_draft + n_gated) * cfg.b_id +
         static_cast<std::uint64_t>(n_draft) * cfg.b_logit;
}

std::uint64_t uplink_bits_full(std::size_t n_draft, std::size_t n_gated, std::size_t vocab_size,
                               const PayloadConfig& cfg) {
  return static_cast<std::uint64_t>(n_draft + n_gated) * cfg.b_id +
         static_cast<std::uint64_t>(n_draft) * vocab_size * cfg.b_logit;
}

std::uint64_t downlink_bits(DownlinkKind kind, std::size_t vocab_size, const PayloadConfig& cfg) {
  if (vocab_size < 2) fail(Errc::kInvalidVocabulary, "vocabulary size must be >= 2");
  if (kind == DownlinkKind::kAccept) return std::uint64_t{cfg.b_acc} + cfg.b_bonus;
  return std::uint64_t{cfg.b_rej} + static_cast<std::uint64_t>(vocab_size) * cfg.b_logit_tar;
}

std::uint64_t downlink_bits_corrected(const PayloadConfig& cfg) {
  return std::uint64_t{cfg.b_rej} + cfg.b_id;
}

double latency(std::uint64_t bits, const ChannelConfig& channel) {
  const double capacity = channel.capacity_bps();
  return static_cast<double>(bits) / capacity;
}

void PayloadLedger::record(const RoundRecord& r) {
  rounds_.push_back(r);
  uplink_ += r.up_bits;
  downlink_ += r.down_bits;
  context_ += r.context_bits;
  wire_bytes_ += r.wire_bytes;
  comm_seconds_ += r.t_comm;
}

std::uint64_t PayloadLedger::overhead_bytes() const noexcept {
  const std::uint64_t payload_bytes = (total_bits() + 7) / 8;
  return wire_bytes_ > payload_bytes ? wire_bytes_ - payload_bytes : 0;
}

bool PayloadLedger::consistent() const noexcept {
  std::uint64_t up = 0, down = 0, ctx = 0;
  for (const auto& r : rounds_) {
    up += r.up_bits;
    down += r.down_bits;
    ctx += r.context_bits;
  }
  return up == uplink_ && down == downlink_ && ctx == context_ && ctx <= up;
}

}  // namespace covspec
