#pragma once

#include <cstdint>
#include <string_view>

namespace covspec {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of two words.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ (splitmix64(b) + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

/// 64-bit FNV-1a over bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Maps a word to a double in the open interval (0, 1) using its top 53 bits.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Counter-based generator. A draw is a pure function of (seed, stream, index),
/// so two processes that agree on the triple agree on the value without
/// sharing any state.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::string_view stream) noexcept
      : SeededRng(seed, fnv1a64(stream)) {}
  SeededRng(std::uint64_t seed, std::uint64_t stream_key) noexcept
      : seed_(seed), stream_(stream_key) {}

  static std::uint64_t draw(std::uint64_t seed, std::uint64_t stream_key,
                            std::uint64_t index) noexcept {
    return splitmix64(hash_combine(hash_combine(seed, stream_key), index));
  }

  std::uint64_t next_u64() noexcept { return draw(seed_, stream_, index_++); }

  /// Uniform on (0, 1); never returns exactly 0 or 1.
  double next_uniform() noexcept { return to_open_unit(next_u64()); }

  /// Standard normal via Box-Muller; consumes two draws.
  double next_normal() noexcept;

  /// A copy of this stream positioned at `index`.
  SeededRng at(std::uint64_t index) const noexcept {
    SeededRng r = *this;
    r.index_ = index;
    return r;
  }

  /// An independent named sub-stream.
  SeededRng fork(std::string_view name) const noexcept {
    return SeededRng(seed_, hash_combine(stream_, fnv1a64(name)));
  }
  SeededRng fork(std::uint64_t id) const noexcept {
    return SeededRng(seed_, hash_combine(stream_, id));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_key() const noexcept { return stream_; }
  std::uint64_t index() const noexcept { return index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
};

}  // namespace covspec
