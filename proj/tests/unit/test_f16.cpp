#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "covspec/error.hpp"
#include "covspec/f16.hpp"
#include "covspec/rng.hpp"

namespace covspec {
namespace {

// Independent decoder built from the IEEE field definitions with integer
// arithmetic only.
double oracle_decode(F16 code) {
  const int e = (code >> 10) & 0x1F;
  const int m = code & 0x3FF;
  double v = e == 0 ? m / 16777216.0 : (1024 + m) * std::pow(2.0, e - 25);
  return (code & 0x8000) ? -v : v;
}

// All finite codes sorted by value, with -0 removed.
std::vector<F16> finite_codes_ascending() {
  std::vector<F16> codes;
  for (int c = 0xFBFF; c > 0x8000; --c) codes.push_back(static_cast<F16>(c));
  for (int c = 0x0000; c <= 0x7BFF; ++c) codes.push_back(static_cast<F16>(c));
  return codes;
}

// Nearest lattice value by exhaustive search; ties go to the even code.
F16 oracle_encode(double x, const std::vector<F16>& lattice) {
  if (x >= 65504.0) return 0x7BFF;
  if (x <= -65504.0) return 0xFBFF;
  F16 best = 0;
  double best_err = INFINITY;
  for (F16 c : lattice) {
    const double err = std::abs(oracle_decode(c) - x);
    if (err < best_err || (err == best_err && (c & 1) == 0 && (best & 1) == 1)) {
      best = c;
      best_err = err;
    }
  }
  if (best == 0 && std::signbit(x)) return 0x8000;
  return best;
}

TEST(F16, SpecExamples) {
  EXPECT_EQ(f16_encode(1.0), 0x3C00);
  EXPECT_EQ(f16_decode(0x3C00), 1.0);
  EXPECT_EQ(f16_encode(0.0), 0x0000);
  EXPECT_EQ(f16_decode(0x0000), 0.0);
  EXPECT_EQ(f16_encode(65504.0), kF16MaxFinite);
  EXPECT_EQ(f16_encode(1e9), kF16MaxFinite);
  EXPECT_EQ(f16_encode(-1e9), 0xFBFF);
  EXPECT_EQ(f16_encode(0x1.0p-24), 0x0001);
}

TEST(F16, NanRejected) {
  EXPECT_THROW(f16_encode(std::numeric_limits<double>::quiet_NaN()), Error);
  EXPECT_THROW(f16_encode_floor(std::numeric_limits<double>::quiet_NaN()), Error);
}

TEST(F16, DecodeMatchesOracleForEveryCode) {
  for (int c = 0; c < 0x10000; ++c) {
    const F16 code = static_cast<F16>(c);
    if (((code >> 10) & 0x1F) == 31) continue;
    ASSERT_EQ(f16_decode(code), oracle_decode(code)) << std::hex << c;
  }
}

TEST(F16, EveryFiniteCodeRoundTrips) {
  for (int c = 0; c < 0x10000; ++c) {
    const F16 code = static_cast<F16>(c);
    if (((code >> 10) & 0x1F) == 31) continue;
    ASSERT_EQ(f16_encode(f16_decode(code)), code) << std::hex << c;
  }
}

TEST(F16, MidpointsRoundToEvenCode) {
  const auto lattice = finite_codes_ascending();
  for (std::size_t i = 0; i + 1 < lattice.size(); ++i) {
    const double lo = oracle_decode(lattice[i]);
    const double hi = oracle_decode(lattice[i + 1]);
    const double mid = 0.5 * (lo + hi);
    F16 expect = (lattice[i] & 1) == 0 ? lattice[i] : lattice[i + 1];
    if (mid == 0.0) continue;
    if (expect == 0 && mid < 0.0) expect = 0x8000;
    ASSERT_EQ(f16_encode(mid), expect) << lo << " " << hi;
  }
}

TEST(F16, RandomValuesMatchNearestSearch) {
  const auto lattice = finite_codes_ascending();
  SeededRng rng(5, "f16");
  for (int i = 0; i < 300; ++i) {
    const double x = (rng.next_uniform() - 0.5) * std::pow(2.0, rng.next_uniform() * 40 - 24);
    ASSERT_EQ(f16_encode(x), oracle_encode(x, lattice)) << x;
  }
}

TEST(F16, FloorIsLargestLatticeValueBelow) {
  const auto lattice = finite_codes_ascending();
  SeededRng rng(6, "floor");
  for (int i = 0; i < 2000; ++i) {
    const double x = (rng.next_uniform() - 0.5) * 40.0;
    const double got = f16_decode(f16_encode_floor(x));
    ASSERT_LE(got, x);
    const auto next = std::upper_bound(lattice.begin(), lattice.end(), got,
                                       [](double v, F16 c) { return v < oracle_decode(c); });
    ASSERT_TRUE(next == lattice.end() || oracle_decode(*next) > x) << x;
  }
  EXPECT_EQ(f16_decode(f16_encode_floor(1.0)), 1.0);
  EXPECT_LT(f16_decode(f16_encode_floor(-1e-9)), 0.0);
}

}  // namespace
}  // namespace covspec
