#pragma once

// Slow, obviously-correct reference implementations used only by tests.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "nuclear/wide.hpp"

namespace oracle {

using nuclear::u128;
using nuclear::u64;

struct Factored {
  u64 radical = 1;
  int mobius = 1;
  u64 psi = 1;
};

inline Factored trial_factor(u64 n) {
  Factored f;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.radical *= p;
    f.psi *= p + 1;
    f.mobius = e > 1 ? 0 : -f.mobius;
  }
  if (n > 1) {
    f.radical *= n;
    f.psi *= n + 1;
    f.mobius = -f.mobius;
  }
  return f;
}

inline u64 radical(u64 n) { return trial_factor(n).radical; }

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline u128 pow128(u64 b, unsigned e) {
  u128 r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

// #{n <= x : k(n)^b <= n^a}; requires the powers to fit in 128 bits.
inline u64 powered_count(u64 x, unsigned a, unsigned b) {
  u64 c = 0;
  for (u64 n = 1; n <= x; ++n) c += pow128(radical(n), b) <= pow128(n, a);
  return c;
}

inline u64 nuclear_count(u64 x, u64 y) {
  u64 c = 0;
  for (u64 m = 1; m <= x; ++m) c += radical(m) <= y;
  return c;
}

// Exact answer of k(n) <= z n^theta (log n)^T in long double, together with a
// flag for cases too close to call.
struct Membership {
  bool member = false;
  bool close = false;
};

inline Membership powered_member(u64 n, long double theta, long double z, long double T) {
  const long double k = static_cast<long double>(radical(n));
  long double t;
  if (n == 1) {
    t = T < 0 ? INFINITY : (T > 0 ? 0.0L : z);
  } else {
    const long double ln = std::log(static_cast<long double>(n));
    t = z * std::exp(theta * ln) * std::pow(ln, T);
  }
  Membership m;
  m.member = k <= t;
  m.close = std::abs(k - t) <= 1e-9L * std::max(k, t);
  return m;
}

// #{l <= z : mu^2(l k) = 1}
inline u64 squarefree_coprime(u64 z, u64 k) {
  u64 c = 0;
  for (u64 l = 1; l <= z; ++l) {
    if (std::gcd(l, k) == 1 && trial_factor(l).mobius != 0) ++c;
  }
  return c;
}

// psi(m) for m <= n from a smallest-prime-factor table.
inline std::vector<u64> psi_table(u64 n) {
  std::vector<u64> spf(n + 1, 0), psi(n + 1, 1);
  for (u64 i = 2; i <= n; ++i) {
    if (spf[i]) continue;
    for (u64 j = i; j <= n; j += i)
      if (!spf[j]) spf[j] = i;
  }
  for (u64 m = 2; m <= n; ++m) {
    const u64 p = spf[m];
    u64 r = m;
    while (r % p == 0) r /= p;
    psi[m] = psi[r] * (p + 1);
  }
  return psi;
}

inline std::mt19937_64 rng(std::uint64_t salt) { return std::mt19937_64(0x5eed0000ULL + salt); }

}  // namespace oracle
