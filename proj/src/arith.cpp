#include "nuclear/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nuclear/error.hpp"

namespace nuclear {

namespace {

constexpr u64 kSegmentSpan = u64{1} << 18;

u64 first_multiple_at_least(u64 p, u64 lo) { return (lo + p - 1) / p * p; }

// Shared radical/mobius/psi kernel. mu and psi may be empty spans when the
// caller only needs radicals.
void sieve_kernel(u64 lo, u64 hi, std::span<const u64> primes,
                  std::span<u64> rad, std::span<u64> smooth,
                  std::span<std::int8_t> mu, std::span<u64> psi) {
  const std::size_t span = hi - lo + 1;
  const bool want_mu = !mu.empty();
  const bool want_psi = !psi.empty();
  std::fill_n(rad.begin(), span, u64{1});
  std::fill_n(smooth.begin(), span, u64{1});
  if (want_mu) std::fill_n(mu.begin(), span, std::int8_t{1});
  if (want_psi) std::fill_n(psi.begin(), span, u64{1});

  const u64 root = isqrt(hi);
  for (u64 p : primes) {
    if (p > root) break;
    for (u64 j = first_multiple_at_least(p, lo); j <= hi; j += p) {
      const std::size_t i = j - lo;
      rad[i] *= p;
      smooth[i] *= p;
      if (want_mu) mu[i] = static_cast<std::int8_t>(-mu[i]);
      if (want_psi) psi[i] *= p + 1;
    }
    for (u64 pk = p * p; pk <= hi;) {
      for (u64 j = first_multiple_at_least(pk, lo); j <= hi; j += pk) {
        const std::size_t i = j - lo;
        smooth[i] *= p;
        if (want_mu) mu[i] = 0;
      }
      if (pk > hi / p) break;
      pk *= p;
    }
  }

  // What is left after removing every prime <= sqrt(hi) is 1 or a single
  // prime above sqrt(hi).
  for (std::size_t i = 0; i < span; ++i) {
    const u64 n = lo + i;
    if (smooth[i] == n) continue;
    const u64 q = n / smooth[i];
    rad[i] *= q;
    if (want_mu) mu[i] = static_cast<std::int8_t>(-mu[i]);
    if (want_psi) psi[i] *= q + 1;
  }
}

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Brent's variant of Pollard rho; n must be composite and odd.
u64 pollard_brent(u64 n) {
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    const u64 block = 128;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    for (u64 r = 1; g == 1; r <<= 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      for (u64 k = 0; k < r && g == 1; k += block) {
        ys = y;
        for (u64 i = 0; i < std::min(block, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  const u64 d = pollard_brent(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::size_t PrimeTable::count_upto(u64 n) const {
  return static_cast<std::size_t>(
      std::upper_bound(primes.begin(), primes.end(), n) - primes.begin());
}

PrimeTable generate_primes(u64 limit, const SieveBudget& budget) {
  PrimeTable table;
  table.limit = limit;
  if (limit < 2) return table;

  const double estimate =
      limit < 17 ? 8.0 : 1.25506 * static_cast<double>(limit) / std::log(static_cast<double>(limit));
  const double bytes = estimate * sizeof(u64) + static_cast<double>(kSegmentSpan);
  if (bytes > static_cast<double>(budget.max_bytes)) {
    fail(ErrorKind::resource_exhausted,
         "prime table up to " + std::to_string(limit) + " needs about " +
             std::to_string(static_cast<u64>(bytes)) + " bytes, budget is " +
             std::to_string(budget.max_bytes));
  }
  table.primes.reserve(static_cast<std::size_t>(estimate));

  const u64 root = isqrt(limit);
  std::vector<char> small(root + 1, 1);
  std::vector<u64> base;
  for (u64 i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (u64 j = i * i; j <= root; j += i) small[j] = 0;
  }

  std::vector<char> mark(kSegmentSpan);
  for (u64 lo = 2; lo <= limit;) {
    const u64 hi = std::min(limit, lo + kSegmentSpan - 1);
    std::fill(mark.begin(), mark.end(), 1);
    for (u64 p : base) {
      if (p * p > hi) break;
      u64 start = std::max(p * p, first_multiple_at_least(p, lo));
      for (u64 j = start; j <= hi; j += p) mark[j - lo] = 0;
    }
    for (u64 n = lo; n <= hi; ++n)
      if (mark[n - lo]) table.primes.push_back(n);
    if (hi == limit) break;
    lo = hi + 1;
  }
  return table;
}

ArithSegment sieve_segment(u64 lo, u64 hi, const PrimeTable& primes,
                           const SieveBudget& budget) {
  if (lo < 1 || lo > hi) {
    fail(ErrorKind::invalid_argument, "segment must satisfy 1 <= lo <= hi");
  }
  if (primes.limit < isqrt(hi)) {
    fail(ErrorKind::invalid_argument,
         "insufficient prime table: limit " + std::to_string(primes.limit) +
             " < floor(sqrt(" + std::to_string(hi) + "))");
  }
  const u64 span = hi - lo + 1;
  const double bytes = static_cast<double>(span) * (3 * sizeof(u64) + 1);
  if (bytes > static_cast<double>(budget.max_bytes)) {
    fail(ErrorKind::resource_exhausted,
         "segment of " + std::to_string(span) + " integers exceeds memory budget");
  }

  ArithSegment seg;
  seg.lo = lo;
  seg.hi = hi;
  seg.radical.resize(span);
  seg.mobius.resize(span);
  seg.psi.resize(span);
  std::vector<u64> smooth(span);
  sieve_kernel(lo, hi, primes.primes, seg.radical, smooth, seg.mobius, seg.psi);
  return seg;
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This base set is deterministic below 2^64.
  for (u64 a : {2, 325, 9375, 28178, 450775, 9780504, 1795265022}) {
    u64 x = powmod(a, d, n);
    if (x == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::pair<u64, unsigned>> factorize(u64 n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "cannot factorise 0");
  std::vector<u64> flat;
  for (u64 p = 2; p < 64 && p * p <= n; ++p) {
    while (n % p == 0) {
      flat.push_back(p);
      n /= p;
    }
  }
  factor_into(n, flat);
  std::sort(flat.begin(), flat.end());
  std::vector<std::pair<u64, unsigned>> out;
  for (u64 p : flat) {
    if (!out.empty() && out.back().first == p) {
      ++out.back().second;
    } else {
      out.emplace_back(p, 1u);
    }
  }
  return out;
}

ArithPoint arith_point(u64 n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "arith_point: n must be >= 1");
  ArithPoint pt{1, 1, 1};
  for (auto [p, e] : factorize(n)) {
    pt.radical *= p;
    pt.mobius = e > 1 ? 0 : -pt.mobius;
    if (__builtin_mul_overflow(pt.psi, p + 1, &pt.psi)) {
      fail(ErrorKind::range, "psi(" + std::to_string(n) + ") exceeds 64 bits");
    }
  }
  return pt;
}

RankinWeight::RankinWeight(double gamma) : gamma_(gamma) {
  if (!(gamma >= 0.0 && gamma <= 0.5)) {
    fail(ErrorKind::invalid_argument, "Rankin weight gamma must lie in [0, 1/2]");
  }
}

double r_gamma(u64 m, RankinWeight w) {
  if (m == 0) fail(ErrorKind::invalid_argument, "r_gamma: m must be >= 1");
  double r = 1.0;
  for (auto [p, e] : factorize(m)) {
    r *= 1.0 + 4.0 * w.gamma() / std::sqrt(static_cast<double>(p));
  }
  return r;
}

u64 squarefree_coprime_count(double z, u64 k) {
  if (std::isnan(z) || z < 0) {
    fail(ErrorKind::invalid_argument, "squarefree_coprime_count: z must be >= 0");
  }
  if (k == 0) fail(ErrorKind::invalid_argument, "squarefree_coprime_count: k must be >= 1");
  if (z >= 9.2e18) fail(ErrorKind::range, "squarefree_coprime_count: z too large");
  std::vector<u64> k_primes;
  for (auto [p, e] : factorize(k)) {
    if (e > 1) {
      fail(ErrorKind::invalid_argument,
           "squarefree_coprime_count: k=" + std::to_string(k) + " is not squarefree");
    }
    k_primes.push_back(p);
  }
  const auto bound = static_cast<u64>(std::floor(z));
  const auto mobius = detail::mobius_table(isqrt(bound));
  const auto divisors = detail::signed_divisors(k_primes);
  return detail::squarefree_coprime_count(bound, k_primes, divisors, mobius);
}

namespace detail {

void sieve_radicals(u64 lo, u64 hi, std::span<const u64> primes,
                    std::span<u64> rad, std::span<u64> smooth) {
  sieve_kernel(lo, hi, primes, rad, smooth, {}, {});
}

std::vector<std::int8_t> mobius_table(u64 n) {
  std::vector<std::int8_t> mu(n + 1, 1);
  std::vector<char> composite(n + 1, 0);
  for (u64 p = 2; p <= n; ++p) {
    if (composite[p]) continue;
    for (u64 j = p; j <= n; j += p) {
      if (j > p) composite[j] = 1;
      mu[j] = static_cast<std::int8_t>(-mu[j]);
    }
    if (p <= n / p) {
      for (u64 j = p * p; j <= n; j += p * p) mu[j] = 0;
    }
  }
  mu[0] = 0;
  return mu;
}

std::vector<std::pair<u64, int>> signed_divisors(std::span<const u64> primes) {
  std::vector<std::pair<u64, int>> divs{{1, 1}};
  for (u64 p : primes) {
    const std::size_t n = divs.size();
    for (std::size_t i = 0; i < n; ++i) {
      divs.emplace_back(divs[i].first * p, -divs[i].second);
    }
  }
  return divs;
}

u64 squarefree_coprime_count(u64 bound, std::span<const u64> k_primes,
                             std::span<const std::pair<u64, int>> k_divisors,
                             std::span<const std::int8_t> mobius) {
  if (bound == 0) return 0;
  std::int64_t total = 0;
  const u64 root = isqrt(bound);
  for (u64 d = 1; d <= root; ++d) {
    const int mu_d = mobius[d];
    if (mu_d == 0) continue;
    bool coprime = true;
    for (u64 q : k_primes) {
      if (d % q == 0) {
        coprime = false;
        break;
      }
    }
    if (!coprime) continue;
    const u64 y = bound / (d * d);
    std::int64_t phi = 0;
    for (auto [e, sign] : k_divisors) {
      if (e > y) continue;
      phi += sign * static_cast<std::int64_t>(y / e);
    }
    total += mu_d * phi;
  }
  return static_cast<u64>(total);
}

}  // namespace detail

}  // namespace nuclear
