#pragma once

// Primes and per-integer arithmetic functions over ranges.
//
// The radical k(n) is the product of the distinct primes dividing n, mu is the
// Moebius function and psi(n) = prod_{p | n} (p + 1).

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nuclear/wide.hpp"

namespace nuclear {

struct SieveBudget {
  // Upper bound on the bytes a single prime table or segment may occupy.
  std::uint64_t max_bytes = std::uint64_t{1} << 31;
};

struct PrimeTable {
  u64 limit = 0;              // inclusive
  std::vector<u64> primes;    // every prime <= limit, ascending

  // pi(n) for n <= limit.
  std::size_t count_upto(u64 n) const;
};

PrimeTable generate_primes(u64 limit, const SieveBudget& budget = {});

struct ArithSegment {
  u64 lo = 1;
  u64 hi = 0;
  std::vector<u64> radical;
  std::vector<std::int8_t> mobius;
  std::vector<u64> psi;

  std::size_t size() const { return radical.size(); }
  u64 radical_of(u64 n) const { return radical[n - lo]; }
  int mobius_of(u64 n) const { return mobius[n - lo]; }
  u64 psi_of(u64 n) const { return psi[n - lo]; }
};

// Requires 1 <= lo <= hi and primes.limit >= floor(sqrt(hi)).
ArithSegment sieve_segment(u64 lo, u64 hi, const PrimeTable& primes,
                           const SieveBudget& budget = {});

struct ArithPoint {
  u64 radical;
  int mobius;
  u64 psi;

  friend bool operator==(const ArithPoint&, const ArithPoint&) = default;
};

ArithPoint arith_point(u64 n);

class RankinWeight {
 public:
  explicit RankinWeight(double gamma);
  double gamma() const { return gamma_; }

 private:
  double gamma_;
};

// prod_{p | m} (1 + 4 gamma p^{-1/2})
double r_gamma(u64 m, RankinWeight w);

// #{l <= z : mu^2(l k) = 1}; k must be squarefree.
u64 squarefree_coprime_count(double z, u64 k);

// Deterministic for all 64-bit n.
bool is_prime_u64(u64 n);

// Prime factorisation, ascending primes with multiplicities.
std::vector<std::pair<u64, unsigned>> factorize(u64 n);

namespace detail {

// Radical-only kernel shared by the counting loops. rad and smooth must both
// hold hi - lo + 1 entries; primes must cover floor(sqrt(hi)).
void sieve_radicals(u64 lo, u64 hi, std::span<const u64> primes,
                    std::span<u64> rad, std::span<u64> smooth);

// Moebius values for 0..n (index 0 unused).
std::vector<std::int8_t> mobius_table(u64 n);

// Counts l <= bound with mu^2(l k) = 1 given the squarefree divisors of k
// with their Moebius signs and a Moebius table covering sqrt(bound).
u64 squarefree_coprime_count(u64 bound, std::span<const u64> k_primes,
                             std::span<const std::pair<u64, int>> k_divisors,
                             std::span<const std::int8_t> mobius);

std::vector<std::pair<u64, int>> signed_divisors(std::span<const u64> primes);

}  // namespace detail

}  // namespace nuclear
