#pragma once

#include <cstdint>

namespace covspec {

/// IEEE 754 binary16 code.
using F16 = std::uint16_t;

inline constexpr F16 kF16MaxFinite = 0x7BFF;  // 65504
inline constexpr double kF16MaxValue = 65504.0;

/// Round-to-nearest-even encoding. Magnitudes at or above 65504 saturate to
/// the largest finite code; subnormals are kept. Throws kInvalidValue on NaN.
F16 f16_encode(double x);

/// Largest binary16 value that is <= x (same saturation rules).
F16 f16_encode_floor(double x);

/// Exact decode of a binary16 code.
double f16_decode(F16 code) noexcept;

/// Projects x onto the binary16 lattice: decode(encode(x)).
inline double f16_round(double x) { return f16_decode(f16_encode(x)); }

}  // namespace covspec
