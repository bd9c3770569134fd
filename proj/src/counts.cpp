#include "nuclear/counts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "nuclear/error.hpp"
#include "nuclear/prime_cache.hpp"
#include "segment_fold.hpp"

namespace nuclear {

namespace {

using Clock = std::chrono::steady_clock;

PrimeTable primes_for(u64 x, const CountOptions& opts) {
  return load_or_generate_primes(isqrt(x), opts.cache_dir, opts.memory);
}

u128 pow_or_range_error(u128 base, unsigned exp, const char* what) {
  auto v = checked_pow(base, exp);
  if (!v) fail(ErrorKind::range, std::string(what) + " exceeds 128-bit range");
  return *v;
}

u64 parse_u64(std::string_view s) {
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(ErrorKind::usage, "malformed integer '" + std::string(s) + "' in rational theta");
  }
  return v;
}

// Binary64 threshold z n^theta (log n)^T, with the n = 1 convention:
// (log 1)^T is +inf for T < 0, 0 for T > 0 and 1 for T = 0.
double threshold(u64 n, double theta, double z, double T) {
  if (n == 1) {
    if (T < 0) return INFINITY;
    if (T > 0) return 0.0;
    return z;
  }
  const double ln = std::log(static_cast<double>(n));
  double t = z * std::exp(theta * ln);
  if (T != 0.0) t *= std::pow(ln, T);
  return t;
}

struct GuardedCount {
  u64 count = 0;
  u64 ambiguous = 0;
};

CountResult count_exact_sieve(const CountQuery& q, const CountOptions& opts) {
  const unsigned a = static_cast<unsigned>(q.theta.num());
  const unsigned b = static_cast<unsigned>(q.theta.den());
  pow_or_range_error(q.x, a, "x^a");
  const auto primes = primes_for(q.x, opts);
  const u64 count = detail::fold_radicals<u64>(
      q.x, primes, opts.threads, 0,
      [&](u64 lo, u64 hi, std::span<const u64> rad, u64& acc) {
        // Members of [lo, hi] have k <= hi^(a/b); k <= lo^(a/b) always passes.
        const u64 accept = iroot_floor(*checked_pow(lo, a), b);
        const u64 reject = iroot_floor(*checked_pow(hi, a), b);
        for (std::size_t i = 0; i < rad.size(); ++i) {
          const u64 k = rad[i];
          if (k > reject) continue;
          if (k <= accept || *checked_pow(k, b) <= *checked_pow(lo + i, a)) ++acc;
        }
      },
      std::plus<>());
  return {count, 0, {}, CountMethod::sieve};
}

CountResult count_guarded_sieve(const CountQuery& q, const CountOptions& opts) {
  const double theta = q.theta_value();
  const auto primes = primes_for(q.x, opts);
  const auto total = detail::fold_radicals<GuardedCount>(
      q.x, primes, opts.threads, {},
      [&](u64 lo, u64 hi, std::span<const u64> rad, GuardedCount& acc) {
        // Cheap upper envelope of the threshold over the segment.
        double envelope;
        if (lo == 1) {
          envelope = INFINITY;
        } else {
          const double log_part = q.Theta > 0 ? std::pow(std::log(static_cast<double>(hi)), q.Theta)
                                              : std::pow(std::log(static_cast<double>(lo)), q.Theta);
          envelope = q.z * std::pow(static_cast<double>(hi), theta) * log_part * (1 + 0x1p-30);
        }
        for (std::size_t i = 0; i < rad.size(); ++i) {
          const double k = static_cast<double>(rad[i]);
          if (k > envelope) continue;
          const double t = threshold(lo + i, theta, q.z, q.Theta);
          if (k > t * (1 + kGuardBand)) continue;
          ++acc.count;
          if (k >= t * (1 - kGuardBand)) ++acc.ambiguous;
        }
        (void)hi;
      },
      [](GuardedCount l, GuardedCount r) {
        return GuardedCount{l.count + r.count, l.ambiguous + r.ambiguous};
      });
  return {total.count, total.ambiguous, {}, CountMethod::sieve};
}

// Smallest-prime-factor table for 0..n.
std::vector<std::uint32_t> spf_table(u64 n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (u64 i = 2; i <= n; ++i) {
    if (spf[i]) continue;
    for (u64 j = i; j <= n; j += i)
      if (!spf[j]) spf[j] = static_cast<std::uint32_t>(i);
  }
  return spf;
}

}  // namespace

ThetaRational::ThetaRational(u64 a, u64 b) {
  if (a == 0 || b == 0 || a >= b) {
    fail(ErrorKind::usage, "theta must satisfy 0 < theta < 1, got " + std::to_string(a) + "/" +
                               std::to_string(b));
  }
  const u64 g = std::gcd(a, b);
  a_ = a / g;
  b_ = b / g;
  if (b_ > 64) fail(ErrorKind::range, "theta denominator above 64 is not supported");
}

ThetaRational ThetaRational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    fail(ErrorKind::usage, "theta must be a rational 'a/b', got '" + std::string(text) + "'");
  }
  return ThetaRational(parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1)));
}

std::string ThetaRational::str() const {
  return std::to_string(a_) + "/" + std::to_string(b_);
}

const char* to_string(CountMethod m) {
  return m == CountMethod::sieve ? "sieve" : "stratified";
}

CountMethod parse_method(std::string_view text) {
  if (text == "sieve") return CountMethod::sieve;
  if (text == "stratified") return CountMethod::stratified;
  fail(ErrorKind::usage, "unknown method '" + std::string(text) + "'");
}

CountResult count_nuclear(u64 x, u64 y, const CountOptions& opts) {
  if (y < 1 || y > x) fail(ErrorKind::invalid_argument, "count_nuclear requires 1 <= y <= x");
  if (x > opts.budget.max_sieve_x) fail(ErrorKind::resource_exhausted, "x exceeds sieve budget");
  const auto start = Clock::now();
  const auto primes = primes_for(x, opts);
  const u64 count = detail::fold_radicals<u64>(
      x, primes, opts.threads, 0,
      [&](u64, u64, std::span<const u64> rad, u64& acc) {
        for (u64 k : rad) acc += k <= y;
      },
      std::plus<>());
  return {count, 0, Clock::now() - start, CountMethod::sieve};
}

CountResult count_powered(const CountQuery& q, const CountOptions& opts) {
  if (q.x < 1) fail(ErrorKind::invalid_argument, "x must be >= 1");
  if (!(q.z > 0) || !std::isfinite(q.z)) fail(ErrorKind::invalid_argument, "z must be positive");
  if (!std::isfinite(q.Theta)) fail(ErrorKind::invalid_argument, "Theta must be finite");
  if (q.theta_float && !(*q.theta_float > 0 && *q.theta_float < 1)) {
    fail(ErrorKind::usage, "floating theta must satisfy 0 < theta < 1");
  }
  if (q.method == CountMethod::stratified) {
    if (!q.exact_predicate()) {
      fail(ErrorKind::unsupported,
           "stratified method requires rational theta, z = 1 and Theta = 0");
    }
    return count_powered_stratified(q.x, q.theta, opts);
  }
  if (q.x > opts.budget.max_sieve_x) {
    fail(ErrorKind::resource_exhausted,
         "x=" + std::to_string(q.x) + " exceeds sieve budget " +
             std::to_string(opts.budget.max_sieve_x));
  }
  const auto start = Clock::now();
  CountResult r = q.exact_predicate() ? count_exact_sieve(q, opts) : count_guarded_sieve(q, opts);
  r.elapsed = Clock::now() - start;
  return r;
}

CountResult count_powered_stratified(u64 x, ThetaRational theta, const CountOptions& opts) {
  if (x < 1) fail(ErrorKind::invalid_argument, "x must be >= 1");
  if (x > opts.budget.max_stratified_x) {
    fail(ErrorKind::resource_exhausted,
         "x=" + std::to_string(x) + " exceeds stratified budget");
  }
  const auto start = Clock::now();
  const unsigned a = static_cast<unsigned>(theta.num());
  const unsigned b = static_cast<unsigned>(theta.den());
  pow_or_range_error(x, a, "x^a");
  // m <= x/y  <=>  m^kappa <= x/m  <=>  m^b <= x^(b-a)
  const u128 split = pow_or_range_error(x, b - a, "x^(b-a)");

  // Every admissible m = r s has r^2 s <= x.
  const u64 r_max = isqrt(x);
  const auto spf = spf_table(r_max);
  const u64 l_max = iroot_floor(*checked_pow(x, a), b);
  const auto mobius = detail::mobius_table(isqrt(l_max) + 1);

  u64 total = 0;
  std::vector<u64> r_primes;
  for (u64 r = 1; r <= r_max; ++r) {
    r_primes.clear();
    bool squarefree = true;
    for (u64 t = r; t > 1;) {
      const u64 p = spf[t];
      t /= p;
      if (t % p == 0) {
        squarefree = false;
        break;
      }
      r_primes.push_back(p);
    }
    if (!squarefree) continue;
    const auto divisors = detail::signed_divisors(r_primes);
    const u64 s_max = x / (r * r);

    // Depth-first over s with rad(s) | r, s <= s_max.
    auto visit = [&](auto&& self, std::size_t from, u64 s) -> void {
      const u64 m = r * s;
      u64 l_bound;
      auto mb = checked_pow(m, b);
      if (mb && *mb <= split) {
        // first range: l k(m) <= m^kappa
        l_bound = iroot_floor(*checked_pow(m, a), b - a) / r;
      } else {
        // second range: l m k(m) <= x
        l_bound = x / m / r;
      }
      if (l_bound >= 1) {
        total += detail::squarefree_coprime_count(l_bound, r_primes, divisors, mobius);
      }
      for (std::size_t j = from; j < r_primes.size(); ++j) {
        const u64 q = r_primes[j];
        if (s > s_max / q) continue;
        self(self, j, s * q);
      }
    };
    visit(visit, 0, 1);
  }
  return {total, 0, Clock::now() - start, CountMethod::stratified};
}

Decomposition decompose(u64 n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "decompose: n must be >= 1");
  const u64 rad_n = arith_point(n).radical;
  const u64 m = n / rad_n;
  return decompose_with(n, rad_n, arith_point(m).radical);
}

u64 lower_bound_W(u64 x, ThetaRational theta) {
  const u64 a = theta.num();
  const u64 b = theta.den();
  // 1/l < theta <= 1/(l-1)
  const u64 l = b / a + 1;
  // With X = x / 8^l: n ranges over (X^(cn/b) / 2, X^(cn/b)],
  // m over (X^(cm/b) / 2, X^(cm/b)], where theta t = cn/b, theta (1-t) = cm/b.
  const u64 cn = l * a - b;
  const u64 cm = b - (l - 1) * a;
  const auto xp = [&](u64 c) { return pow_or_range_error(x, static_cast<unsigned>(c), "x^c"); };
  const auto eightp = [&](u64 c) {
    return pow_or_range_error(8, static_cast<unsigned>(l * c), "8^(l c)");
  };

  // Largest v with (scale v)^b 8^(l c) <= x^c.
  auto top = [&](u64 c, u64 scale) -> u64 {
    const u128 rhs = xp(c);
    const u128 eight = eightp(c);
    u64 v = iroot_floor(rhs / eight, static_cast<unsigned>(b)) / scale + 2;
    auto ok = [&](u64 t) {
      auto p = checked_pow(static_cast<u128>(scale) * t, static_cast<unsigned>(b));
      return p && *p <= rhs / eight;
    };
    while (v > 0 && !ok(v)) --v;
    return v;
  };
  const u64 n_hi = top(cn, 1), n_lo = top(cn, 2);
  const u64 m_hi = top(cm, 1), m_lo = top(cm, 2);
  if (n_hi <= n_lo || m_hi <= m_lo) return 0;

  const auto mu = detail::mobius_table(std::max(n_hi, m_hi));
  std::vector<u64> ns, ms;
  for (u64 n = n_lo + 1; n <= n_hi; ++n)
    if (mu[n] != 0) ns.push_back(n);
  for (u64 m = m_lo + 1; m <= m_hi; ++m)
    if (mu[m] != 0) ms.push_back(m);

  std::vector<u64> ws;
  ws.reserve(ns.size() * ms.size());
  const u128 eight_l = pow_or_range_error(8, static_cast<unsigned>(l), "8^l");
  for (u64 n : ns) {
    for (u64 m : ms) {
      const u128 w = eight_l * pow_or_range_error(n, static_cast<unsigned>(l - 1), "n^(l-1)") *
                     pow_or_range_error(m, static_cast<unsigned>(l), "m^l");
      if (w > x) fail(ErrorKind::numeric, "lower_bound_W: constructed w exceeds x");
      const u64 rad = arith_point(2 * n * m).radical;
      auto lhs = checked_pow(rad, static_cast<unsigned>(b));
      auto rhs = checked_pow(w, static_cast<unsigned>(a));
      if (!lhs || !rhs || *lhs > *rhs) {
        fail(ErrorKind::numeric, "lower_bound_W: constructed w is not a member");
      }
      ws.push_back(static_cast<u64>(w));
    }
  }
  std::sort(ws.begin(), ws.end());
  if (std::adjacent_find(ws.begin(), ws.end()) != ws.end()) {
    fail(ErrorKind::numeric, "lower_bound_W: representation is not unique");
  }
  return ws.size();
}

double erdos_ratio(u64 x, const CountOptions& opts) {
  if (x < 2) fail(ErrorKind::invalid_argument, "erdos_ratio requires x >= 2");
  if (x > opts.budget.max_sieve_x) fail(ErrorKind::resource_exhausted, "x exceeds sieve budget");
  struct Acc {
    u128 num = 0;
    long double den = 0;
    long double comp = 0;
  };
  // Neumaier summation.
  auto add = [](Acc& acc, long double v) {
    const long double t = acc.den + v;
    if (std::fabs(acc.den) >= std::fabs(v)) {
      acc.comp += (acc.den - t) + v;
    } else {
      acc.comp += (v - t) + acc.den;
    }
    acc.den = t;
  };
  const auto primes = primes_for(x, opts);
  const Acc total = detail::fold_radicals<Acc>(
      x, primes, opts.threads, {},
      [&](u64 lo, u64, std::span<const u64> rad, Acc& acc) {
        for (std::size_t i = 0; i < rad.size(); ++i) {
          acc.num += (lo + i) / rad[i];
          add(acc, 1.0L / static_cast<long double>(rad[i]));
        }
      },
      [&](Acc l, const Acc& r) {
        l.num += r.num;
        add(l, r.den);
        add(l, r.comp);
        return l;
      });
  const long double den = total.den + total.comp;
  return static_cast<double>(static_cast<long double>(total.num) /
                             (static_cast<long double>(x) * den));
}

}  // namespace nuclear
