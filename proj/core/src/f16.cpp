#include "covspec/f16.hpp"

#include <cmath>

#include "covspec/error.hpp"

namespace covspec {

namespace {

F16 encode_magnitude(double a) {
  if (a >= kF16MaxValue) return kF16MaxFinite;
  if (a < 0x1.0p-14) {
    // Subnormal lattice spacing is 2^-24; a carry into 1024 lands on the
    // smallest normal code, which is the correct encoding.
    return static_cast<F16>(std::nearbyint(a * 0x1.0p24));
  }
  int exp2 = 0;
  const double frac = std::frexp(a, &exp2);  // a = frac * 2^exp2, frac in [0.5, 1)
  int exponent = exp2 - 1;
  double mantissa = std::nearbyint((frac * 2.0 - 1.0) * 1024.0);
  if (mantissa >= 1024.0) {
    mantissa = 0.0;
    ++exponent;
  }
  const int biased = exponent + 15;
  if (biased >= 31) return kF16MaxFinite;
  return static_cast<F16>((biased << 10) | static_cast<int>(mantissa));
}

}  // namespace

F16 f16_encode(double x) {
  if (std::isnan(x)) fail(Errc::kInvalidValue, "NaN cannot be encoded as binary16");
  const F16 sign = std::signbit(x) ? 0x8000 : 0x0000;
  return static_cast<F16>(sign | encode_magnitude(std::abs(x)));
}

F16 f16_encode_floor(double x) {
  F16 code = f16_encode(x);
  if (f16_decode(code) <= x) return code;
  // One lattice step toward negative infinity.
  if (code == 0x0000) return 0x8001;
  if (code & 0x8000) return code == 0xFBFF ? code : static_cast<F16>(code + 1);
  return static_cast<F16>(code - 1);
}

double f16_decode(F16 code) noexcept {
  const bool negative = (code & 0x8000) != 0;
  const int exponent = (code >> 10) & 0x1F;
  const int mantissa = code & 0x3FF;
  double value;
  if (exponent == 0) {
    value = std::ldexp(static_cast<double>(mantissa), -24);
  } else if (exponent == 31) {
    value = mantissa == 0 ? INFINITY : NAN;
  } else {
    value = std::ldexp(static_cast<double>(1024 + mantissa), exponent - 25);
  }
  return negative ? -value : value;
}

}  // namespace covspec
