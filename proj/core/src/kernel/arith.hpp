#pragma once

#include <algorithm>
#include <cstdint>

namespace bdead::kernel {

// Interval ends saturate here, well inside int64 so sums never overflow.
inline constexpr std::int64_t kInf = std::int64_t{1} << 50;

inline std::int64_t clamp_inf(std::int64_t v) { return std::clamp(v, -kInf, kInf); }

inline std::int64_t sat_add(std::int64_t a, std::int64_t b) { return clamp_inf(a + b); }

inline std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) return ((a < 0) != (b < 0)) ? -kInf : kInf;
  return clamp_inf(r);
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

}  // namespace bdead::kernel
