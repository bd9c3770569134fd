#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

namespace nuclear {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr u128 kU128Max = ~u128{0};

// base^exp, or nullopt when the result does not fit in 128 bits.
inline std::optional<u128> checked_pow(u128 base, unsigned exp) {
  u128 result = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && result > kU128Max / base) return std::nullopt;
    result *= base;
  }
  return result;
}

inline u64 isqrt(u64 n) {
  auto r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Largest t with t^k <= value (k >= 1).
inline u64 iroot_floor(u128 value, unsigned k) {
  if (k == 1) return value > UINT64_MAX ? UINT64_MAX : static_cast<u64>(value);
  if (value == 0) return 0;
  long double approx = std::pow(static_cast<long double>(value), 1.0L / k);
  u64 t = approx >= 1.8e19L ? UINT64_MAX : static_cast<u64>(approx);
  auto fits = [&](u64 c) {
    auto p = checked_pow(c, k);
    return p && *p <= value;
  };
  while (t > 0 && !fits(t)) --t;
  while (t < UINT64_MAX && fits(t + 1)) ++t;
  return t;
}

}  // namespace nuclear
