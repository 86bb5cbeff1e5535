#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "covspec/f16.hpp"
#include "covspec/payload.hpp"
#include "covspec/probcore.hpp"

namespace covspec {

enum class MessageType : std::uint8_t {
  kUplink = 0x01,
  kDownlinkAccept = 0x02,
  kDownlinkReject = 0x03,
  kUplinkFull = 0x04,
  kDownlinkCorrected = 0x05,
};

/// Draft-logit code (+inf in binary16) marking a token in the drafted list that
/// the device's gate committed. The edge accepts it without a test and the
/// payload counts it as a gated ID.
inline constexpr F16 kGatedCode = 0x7C00;

/// Gated context IDs, drafted IDs and one binary16 draft log-probability per
/// drafted token.
struct Uplink {
  std::vector<TokenId> gated;
  std::vector<TokenId> draft;
  std::vector<F16> draft_logits;
  friend bool operator==(const Uplink&, const Uplink&) = default;
};

/// Uplink variant carrying the full draft logit vector for every drafted
/// position, row-major n_draft x vocab_size. A gated token's row is filled with
/// kGatedCode.
struct UplinkFull {
  std::vector<TokenId> gated;
  std::vector<TokenId> draft;
  std::uint32_t vocab_size = 0;
  std::vector<F16> draft_logits;
  friend bool operator==(const UplinkFull&, const UplinkFull&) = default;
};

struct DownlinkAccept {
  std::uint16_t accepted_len = 0;
  TokenId bonus = 0;
  friend bool operator==(const DownlinkAccept&, const DownlinkAccept&) = default;
};

/// Target logits at the first rejected position; vocab size = logits.size().
struct DownlinkReject {
  std::uint16_t accepted_len = 0;
  std::vector<F16> target_logits;
  friend bool operator==(const DownlinkReject&, const DownlinkReject&) = default;
};

struct DownlinkCorrected {
  std::uint16_t accepted_len = 0;
  TokenId correction = 0;
  friend bool operator==(const DownlinkCorrected&, const DownlinkCorrected&) = default;
};

using Message = std::variant<Uplink, DownlinkAccept, DownlinkReject, UplinkFull, DownlinkCorrected>;

inline constexpr std::size_t kFrameHeaderBytes = 5;
/// Largest body a peer may declare (64 MiB).
inline constexpr std::uint32_t kMaxBodyBytes = 1u << 26;

MessageType message_type(const Message& msg) noexcept;

/// type (1 byte) || body length (u32 LE) || body. Throws kFrameError when a
/// field does not fit its declared width.
std::vector<std::uint8_t> encode_message(const Message& msg);

/// Body length from a 5-byte header. Throws kUnknownMessage on a bad type and
/// kFrameError when the length exceeds kMaxBodyBytes.
struct FrameHeader {
  MessageType type;
  std::uint32_t body_length;
};
FrameHeader decode_header(std::span<const std::uint8_t> header);

/// Decodes one complete frame. Throws kFrameError on truncation, trailing
/// bytes or inconsistent counts; kUnknownMessage on an unknown type byte.
Message decode_message(std::span<const std::uint8_t> frame);

/// Payload bits the message contributes to the ledger (header and counters
/// excluded).
std::uint64_t payload_bits(const Message& msg, const PayloadConfig& cfg);

}  // namespace covspec
