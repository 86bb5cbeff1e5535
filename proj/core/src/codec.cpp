#include "covspec/codec.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "covspec/error.hpp"

namespace covspec {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> body) : body_(body) {}

  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>(body_[pos_] | (body_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(body_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  void finish() const {
    if (pos_ != body_.size()) fail(Errc::kFrameError, "trailing bytes in frame body");
  }
  std::size_t remaining() const { return body_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (body_.size() - pos_ < n) fail(Errc::kFrameError, "truncated frame body");
  }

  std::span<const std::uint8_t> body_;
  std::size_t pos_ = 0;
};

std::uint16_t checked_u16(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint16_t>::max()) {
    fail(Errc::kFrameError, std::string(what) + " does not fit in 16 bits");
  }
  return static_cast<std::uint16_t>(n);
}

std::uint32_t checked_u32(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    fail(Errc::kFrameError, std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(n);
}

void write_body(Writer& w, const Uplink& m) {
  if (m.draft_logits.size() != m.draft.size()) {
    fail(Errc::kFrameError, "uplink needs exactly one draft logit per drafted token");
  }
  w.u16(checked_u16(m.gated.size(), "gated count"));
  w.u16(checked_u16(m.draft.size(), "draft count"));
  for (TokenId t : m.gated) w.u32(t);
  for (TokenId t : m.draft) w.u32(t);
  for (F16 c : m.draft_logits) w.u16(c);
}

void write_body(Writer& w, const UplinkFull& m) {
  if (m.draft_logits.size() != static_cast<std::size_t>(m.vocab_size) * m.draft.size()) {
    fail(Errc::kFrameError, "full uplink logit count must be n_draft * vocab_size");
  }
  w.u16(checked_u16(m.gated.size(), "gated count"));
  w.u16(checked_u16(m.draft.size(), "draft count"));
  w.u32(m.vocab_size);
  for (TokenId t : m.gated) w.u32(t);
  for (TokenId t : m.draft) w.u32(t);
  for (F16 c : m.draft_logits) w.u16(c);
}

void write_body(Writer& w, const DownlinkAccept& m) {
  w.u16(m.accepted_len);
  w.u32(m.bonus);
}

void write_body(Writer& w, const DownlinkReject& m) {
  w.u16(m.accepted_len);
  w.u32(checked_u32(m.target_logits.size(), "vocab size"));
  for (F16 c : m.target_logits) w.u16(c);
}

void write_body(Writer& w, const DownlinkCorrected& m) {
  w.u16(m.accepted_len);
  w.u32(m.correction);
}

std::vector<TokenId> read_ids(Reader& r, std::size_t n) {
  if (r.remaining() / 4 < n) fail(Errc::kFrameError, "truncated token list");
  std::vector<TokenId> ids(n);
  for (auto& t : ids) t = r.u32();
  return ids;
}

std::vector<F16> read_f16(Reader& r, std::size_t n) {
  if (r.remaining() / 2 < n) fail(Errc::kFrameError, "truncated logit list");
  std::vector<F16> codes(n);
  for (auto& c : codes) c = r.u16();
  return codes;
}

}  // namespace

MessageType message_type(const Message& msg) noexcept {
  switch (msg.index()) {
    case 0: return MessageType::kUplink;
    case 1: return MessageType::kDownlinkAccept;
    case 2: return MessageType::kDownlinkReject;
    case 3: return MessageType::kUplinkFull;
    default: return MessageType::kDownlinkCorrected;
  }
}

std::vector<std::uint8_t> encode_message(const Message& msg) {
  Writer body;
  std::visit([&](const auto& m) { write_body(body, m); }, msg);
  Writer frame;
  frame.u8(static_cast<std::uint8_t>(message_type(msg)));
  if (body.bytes().size() > kMaxBodyBytes) fail(Errc::kFrameError, "message body too large");
  frame.u32(static_cast<std::uint32_t>(body.bytes().size()));
  auto out = std::move(frame.bytes());
  out.insert(out.end(), body.bytes().begin(), body.bytes().end());
  return out;
}

FrameHeader decode_header(std::span<const std::uint8_t> header) {
  if (header.size() < kFrameHeaderBytes) fail(Errc::kFrameError, "truncated frame header");
  const std::uint8_t type = header[0];
  if (type < 0x01 || type > 0x05) {
    fail(Errc::kUnknownMessage, "unknown message type " + std::to_string(type));
  }
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(header[1 + i]) << (8 * i);
  if (len > kMaxBodyBytes) fail(Errc::kFrameError, "declared body length too large");
  return {static_cast<MessageType>(type), len};
}

Message decode_message(std::span<const std::uint8_t> frame) {
  const FrameHeader h = decode_header(frame);
  if (frame.size() - kFrameHeaderBytes != h.body_length) {
    fail(Errc::kFrameError, "frame length disagrees with header");
  }
  Reader r(frame.subspan(kFrameHeaderBytes));
  Message out;
  switch (h.type) {
    case MessageType::kUplink: {
      Uplink m;
      const std::size_t n_gated = r.u16();
      const std::size_t n_draft = r.u16();
      m.gated = read_ids(r, n_gated);
      m.draft = read_ids(r, n_draft);
      m.draft_logits = read_f16(r, n_draft);
      out = std::move(m);
      break;
    }
    case MessageType::kUplinkFull: {
      UplinkFull m;
      const std::size_t n_gated = r.u16();
      const std::size_t n_draft = r.u16();
      m.vocab_size = r.u32();
      m.gated = read_ids(r, n_gated);
      m.draft = read_ids(r, n_draft);
      if (m.vocab_size != 0 && r.remaining() / 2 / m.vocab_size < n_draft) {
        fail(Errc::kFrameError, "truncated logit matrix");
      }
      m.draft_logits = read_f16(r, n_draft * m.vocab_size);
      out = std::move(m);
      break;
    }
    case MessageType::kDownlinkAccept: {
      DownlinkAccept m;
      m.accepted_len = r.u16();
      m.bonus = r.u32();
      out = m;
      break;
    }
    case MessageType::kDownlinkReject: {
      DownlinkReject m;
      m.accepted_len = r.u16();
      const std::size_t vocab = r.u32();
      m.target_logits = read_f16(r, vocab);
      out = std::move(m);
      break;
    }
    case MessageType::kDownlinkCorrected: {
      DownlinkCorrected m;
      m.accepted_len = r.u16();
      m.correction = r.u32();
      out = m;
      break;
    }
  }
  r.finish();
  return out;
}

std::uint64_t payload_bits(const Message& msg, const PayloadConfig& cfg) {
  struct Visitor {
    const PayloadConfig& cfg;
    std::uint64_t operator()(const Uplink& m) const {
      const auto g = std::min(m.draft.size(), static_cast<std::size_t>(std::count(
                                                  m.draft_logits.begin(), m.draft_logits.end(),
                                                  kGatedCode)));
      return uplink_bits(m.draft.size() - g, m.gated.size() + g, cfg);
    }
    std::uint64_t operator()(const UplinkFull& m) const {
      std::size_t g = 0;
      for (std::size_t i = 0; i < m.draft.size(); ++i) {
        const std::size_t at = i * m.vocab_size;
        if (at < m.draft_logits.size() && m.draft_logits[at] == kGatedCode) ++g;
      }
      return uplink_bits_full(m.draft.size() - g, m.gated.size() + g, m.vocab_size, cfg);
    }
    std::uint64_t operator()(const DownlinkAccept&) const {
      return std::uint64_t{cfg.b_acc} + cfg.b_bonus;
    }
    std::uint64_t operator()(const DownlinkReject& m) const {
      return downlink_bits(DownlinkKind::kReject, m.target_logits.size(), cfg);
    }
    std::uint64_t operator()(const DownlinkCorrected&) const { return downlink_bits_corrected(cfg); }
  };
  return std::visit(Visitor{cfg}, msg);
}

}  // namespace covspec
