#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace covspec {

/// Bit widths of every field counted in the payload formulas.
struct PayloadConfig {
  std::uint32_t b_id = 32;
  std::uint32_t b_logit = 16;
  std::uint32_t b_logit_tar = 16;
  std::uint32_t b_acc = 16;
  std::uint32_t b_bonus = 32;
  std::uint32_t b_rej = 16;

  void validate() const;
};

struct ChannelConfig {
  double bandwidth_hz = 5e6;
  double snr_db = 10.0;

  void validate() const;
  /// B * log2(1 + 10^(SNR/10)) in bit/s.
  double capacity_bps() const;
};

enum class DownlinkKind { kAccept, kReject };

/// Drafted tokens carry an ID and one draft logit each; gated context tokens
/// carry only an ID.
std::uint64_t uplink_bits(std::size_t n_draft, std::size_t n_gated, const PayloadConfig& cfg);

/// Uplink when the device ships full-vocabulary draft logits for every drafted
/// position (edge-side correction).
std::uint64_t uplink_bits_full(std::size_t n_draft, std::size_t n_gated, std::size_t vocab_size,
                               const PayloadConfig& cfg);

/// Accept: b_acc + b_bonus. Reject: b_rej + |W| * b_logit_tar. Throws
/// kInvalidVocabulary for |W| < 2.
std::uint64_t downlink_bits(DownlinkKind kind, std::size_t vocab_size, const PayloadConfig& cfg);

/// Downlink carrying an edge-computed correction token: b_rej + b_id.
std::uint64_t downlink_bits_corrected(const PayloadConfig& cfg);

/// Transmission time of `bits` over the channel, in seconds.
double latency(std::uint64_t bits, const ChannelConfig& channel);

struct RoundRecord {
  std::uint64_t up_bits = 0;
  std::uint64_t down_bits = 0;
  /// Portion of up_bits spent on gated context token IDs.
  std::uint64_t context_bits = 0;
  /// Frame bytes actually put on the wire (header, counters, payload).
  std::uint64_t wire_bytes = 0;
  double t_comm = 0.0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

/// Cumulative uplink/downlink accounting, one record per interaction round.
class PayloadLedger {
 public:
  void record(const RoundRecord& r);

  std::uint64_t uplink_bits() const noexcept { return uplink_; }
  std::uint64_t downlink_bits() const noexcept { return downlink_; }
  std::uint64_t total_bits() const noexcept { return uplink_ + downlink_; }
  std::uint64_t context_bits() const noexcept { return context_; }
  /// Uplink bits excluding gated context IDs.
  std::uint64_t strict_uplink_bits() const noexcept { return uplink_ - context_; }
  /// Wire bytes beyond the counted payload (type, length, counters).
  std::uint64_t overhead_bytes() const noexcept;
  double comm_seconds() const noexcept { return comm_seconds_; }

  const std::vector<RoundRecord>& rounds() const noexcept { return rounds_; }

  /// Totals equal the sums over per-round records.
  bool consistent() const noexcept;

 private:
  std::vector<RoundRecord> rounds_;
  std::uint64_t uplink_ = 0;
  std::uint64_t downlink_ = 0;
  std::uint64_t context_ = 0;
  std::uint64_t wire_bytes_ = 0;
  double comm_seconds_ = 0.0;
};

}  // namespace covspec
