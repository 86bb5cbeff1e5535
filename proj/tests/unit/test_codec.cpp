#include <gtest/gtest.h>

#include "covspec/codec.hpp"
#include "covspec/error.hpp"
#include "covspec/rng.hpp"

namespace covspec {
namespace {

using Bytes = std::vector<std::uint8_t>;

Errc code_of(const Bytes& frame) {
  try {
    decode_message(frame);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a decode error";
  return Errc::kConfigError;
}

TEST(Codec, UplinkByteDump) {
  const Uplink m{{7}, {1, 258}, {0x3C00, 0xBC00}};
  const Bytes expect = {0x01, 0x14, 0x00, 0x00, 0x00,  // type, body length 20
                        0x01, 0x00, 0x02, 0x00,        // n_gated, n_draft
                        0x07, 0x00, 0x00, 0x00,        // gated id
                        0x01, 0x00, 0x00, 0x00, 0x02, 0x01, 0x00, 0x00,  // drafted ids
                        0x00, 0x3C, 0x00, 0xBC};       // 1.0, -1.0
  EXPECT_EQ(encode_message(m), expect);
  EXPECT_EQ(std::get<Uplink>(decode_message(expect)), m);
}

TEST(Codec, DownlinkByteDumps) {
  EXPECT_EQ(encode_message(DownlinkAccept{3, 0x01020304}),
            (Bytes{0x02, 0x06, 0, 0, 0, 0x03, 0x00, 0x04, 0x03, 0x02, 0x01}));
  EXPECT_EQ(encode_message(DownlinkReject{1, {0x3C00, 0x0000}}),
            (Bytes{0x03, 0x0A, 0, 0, 0, 0x01, 0x00, 0x02, 0, 0, 0, 0x00, 0x3C, 0x00, 0x00}));
  EXPECT_EQ(encode_message(DownlinkCorrected{2, 5}),
            (Bytes{0x05, 0x06, 0, 0, 0, 0x02, 0x00, 0x05, 0, 0, 0}));
  EXPECT_EQ(encode_message(UplinkFull{{}, {4}, 2, {0x3C00, 0x4000}}),
            (Bytes{0x04, 0x10, 0, 0, 0, 0, 0, 1, 0, 2, 0, 0, 0, 4, 0, 0, 0, 0x00, 0x3C, 0x00, 0x40}));
}

TEST(Codec, EmptyUplinkBodyIsFourBytes) {
  const Bytes f = encode_message(Uplink{});
  EXPECT_EQ(f.size(), kFrameHeaderBytes + 4);
  EXPECT_EQ(decode_header(f).body_length, 4u);
}

// Body length = payload bytes + fixed counter bytes, over the full grid of
// draft lengths and power-of-two vocabularies.
TEST(Codec, BodyLengthMatchesPayloadArithmetic) {
  const PayloadConfig cfg;
  for (std::size_t n = 0; n <= 16; ++n) {
    const Uplink up{{}, std::vector<TokenId>(n, 1), std::vector<F16>(n, 0)};
    const Bytes f = encode_message(up);
    EXPECT_EQ(f.size() - kFrameHeaderBytes, (uplink_bits(n, 0, cfg) + 7) / 8 + 4);
    EXPECT_EQ(payload_bits(up, cfg), uplink_bits(n, 0, cfg));
  }
  for (std::size_t w = 2; w <= 1024; w *= 2) {
    const DownlinkReject rej{0, std::vector<F16>(w, 0)};
    EXPECT_EQ(encode_message(rej).size() - kFrameHeaderBytes,
              (downlink_bits(DownlinkKind::kReject, w, cfg) + 7) / 8 + 4);
    EXPECT_EQ(payload_bits(rej, cfg), downlink_bits(DownlinkKind::kReject, w, cfg));
    EXPECT_EQ(encode_message(DownlinkAccept{}).size() - kFrameHeaderBytes,
              (downlink_bits(DownlinkKind::kAccept, w, cfg) + 7) / 8);
  }
}

TEST(Codec, GatedCodesCountAsGatedIds) {
  const PayloadConfig cfg;
  const Uplink up{{3}, {1, 2, 4, 5}, {0x3C00, kGatedCode, 0xBC00, kGatedCode}};
  EXPECT_EQ(payload_bits(up, cfg), uplink_bits(2, 3, cfg));
  EXPECT_EQ(std::get<Uplink>(decode_message(encode_message(up))), up);

  UplinkFull full{{}, {1, 2}, 2, {0x3C00, 0x4000, kGatedCode, kGatedCode}};
  EXPECT_EQ(payload_bits(full, cfg), uplink_bits_full(1, 1, 2, cfg));
  EXPECT_EQ(std::get<UplinkFull>(decode_message(encode_message(full))), full);
}

TEST(Codec, OversizedBodyRejected) {
  const Bytes header = {0x03, 0x01, 0x00, 0x00, 0x04};  // 64 MiB + 1
  EXPECT_EQ(code_of(header), Errc::kFrameError);
  EXPECT_EQ(decode_header(Bytes{0x03, 0x00, 0x00, 0x00, 0x04}).body_length, kMaxBodyBytes);
}

TEST(Codec, DecodeErrors) {
  Bytes up = encode_message(Uplink{{}, {1}, {0}});
  EXPECT_EQ(code_of(Bytes(up.begin(), up.end() - 1)), Errc::kFrameError);
  Bytes longer = up;
  longer.push_back(0);
  EXPECT_EQ(code_of(longer), Errc::kFrameError);
  longer[1] += 1;  // header agrees, body has a trailing byte
  EXPECT_EQ(code_of(longer), Errc::kFrameError);
  Bytes bad = up;
  bad[0] = 0x09;
  EXPECT_EQ(code_of(bad), Errc::kUnknownMessage);
  EXPECT_EQ(code_of(Bytes{0x01, 0, 0}), Errc::kFrameError);
  // Counters claim more ids than the body holds.
  EXPECT_EQ(code_of(Bytes{0x01, 4, 0, 0, 0, 0xFF, 0xFF, 0, 0}), Errc::kFrameError);
  EXPECT_THROW(encode_message(Uplink{{}, {1, 2}, {0}}), Error);
}

Message random_message(SeededRng& rng) {
  auto ids = [&](std::size_t n) {
    std::vector<TokenId> v(n);
    for (auto& t : v) t = static_cast<TokenId>(rng.next_u64());
    return v;
  };
  auto codes = [&](std::size_t n) {
    std::vector<F16> v(n);
    for (auto& c : v) c = static_cast<F16>(rng.next_u64());
    return v;
  };
  const auto n = [&](std::size_t cap) { return static_cast<std::size_t>(rng.next_u64() % cap); };
  switch (rng.next_u64() % 5) {
    case 0: {
      const std::size_t k = n(20);
      return Uplink{ids(n(5)), ids(k), codes(k)};
    }
    case 1: return DownlinkAccept{static_cast<std::uint16_t>(rng.next_u64()), ids(1)[0]};
    case 2: return DownlinkReject{static_cast<std::uint16_t>(rng.next_u64()), codes(2 + n(64))};
    case 3: {
      const std::size_t k = n(5);
      const std::uint32_t w = static_cast<std::uint32_t>(2 + n(10));
      return UplinkFull{ids(n(3)), ids(k), w, codes(k * w)};
    }
    default: return DownlinkCorrected{static_cast<std::uint16_t>(rng.next_u64()), ids(1)[0]};
  }
}

TEST(Codec, FuzzRoundTripAndTruncation) {
  SeededRng rng(12, "codec-fuzz");
  for (int i = 0; i < 2000; ++i) {
    const Message m = random_message(rng);
    const Bytes f = encode_message(m);
    ASSERT_EQ(decode_message(f), m);
    const std::size_t cut = rng.next_u64() % f.size();
    EXPECT_THROW(decode_message(Bytes(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(cut))),
                 Error);
  }
}

TEST(Codec, FuzzRandomBytesNeverCrash) {
  SeededRng rng(13, "codec-bytes");
  for (int i = 0; i < 5000; ++i) {
    Bytes f(rng.next_u64() % 40);
    for (auto& b : f) b = static_cast<std::uint8_t>(rng.next_u64());
    if (f.size() >= 5 && rng.next_u64() % 2) {
      f[0] = static_cast<std::uint8_t>(1 + rng.next_u64() % 5);
      const std::uint32_t len = static_cast<std::uint32_t>(f.size() - 5);
      for (int b = 0; b < 4; ++b) f[1 + b] = static_cast<std::uint8_t>(len >> (8 * b));
    }
    try {
      const Message m = decode_message(f);
      EXPECT_EQ(encode_message(m), f);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == Errc::kFrameError || e.code() == Errc::kUnknownMessage);
    }
  }
}

}  // namespace
}  // namespace covspec
