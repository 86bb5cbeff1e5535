#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "covspec/rng.hpp"

namespace covspec {
namespace {

TEST(SeededRng, DrawIsPureFunctionOfTriple) {
  SeededRng a(42, "draft");
  SeededRng b(42, "draft");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(SeededRng(42, "draft").at(17).next_u64(), SeededRng::draw(42, fnv1a64("draft"), 17));
}

TEST(SeededRng, StreamsAndSeedsDiffer) {
  EXPECT_NE(SeededRng(1, "draft").next_u64(), SeededRng(1, "verify").next_u64());
  EXPECT_NE(SeededRng(1, "draft").next_u64(), SeededRng(2, "draft").next_u64());
  const SeededRng root(5, "root");
  EXPECT_NE(root.fork("a").next_u64(), root.fork("b").next_u64());
  EXPECT_NE(root.fork(1).next_u64(), root.fork(2).next_u64());
}

TEST(SeededRng, UniformStaysInsideOpenInterval) {
  EXPECT_GT(to_open_unit(0), 0.0);
  EXPECT_LT(to_open_unit(~0ULL), 1.0);
  SeededRng r(3, "u");
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.next_uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(SeededRng, NormalMoments) {
  SeededRng r(9, "normal");
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.next_normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(SeededRng, Splitmix64KnownValues) {
  // Reference outputs of the SplitMix64 generator seeded with 0.
  std::uint64_t state = 0;
  auto next = [&] {
    const std::uint64_t out = splitmix64(state);
    state += 0x9e3779b97f4a7c15ULL;
    return out;
  };
  EXPECT_EQ(next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(next(), 0x06c45d188009454fULL);
}

TEST(Fnv1a64, KnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(HashCombine, OrderSensitive) {
  EXPECT_NE(hash_combine(1, 2), hash_combine(2, 1));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(hash_combine(7, i));
  EXPECT_EQ(seen.size(), 1000u);
}

}  // namespace
}  // namespace covspec
