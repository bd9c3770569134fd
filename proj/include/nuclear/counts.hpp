#pragma once

// Exact counting of integers with a small squarefree kernel.
//
//   S_theta(x)        = #{n <= x : k(n) <= n^theta}
//   N(x, y)           = #{m <= x : k(m) <= y}
//   B(x, z)           = #{n <= x : k(n) <= z n^theta}
//   S_{theta,T}(x)    = #{n <= x : k(n) <= n^theta (log n)^T}
//
// count_powered covers all of the above through one predicate
// k(n) <= z n^theta (log n)^T. With z = 1 and T = 0 the predicate is decided in
// integers; otherwise it is evaluated in binary64 with a guard band and the
// undecidable cases are reported.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "nuclear/arith.hpp"
#include "nuclear/wide.hpp"

namespace nuclear {

// theta = a/b in lowest terms, 0 < theta < 1.
class ThetaRational {
 public:
  ThetaRational(u64 a, u64 b);

  // Parses "a/b"; throws Error(usage) on anything else.
  static ThetaRational parse(std::string_view text);

  u64 num() const { return a_; }
  u64 den() const { return b_; }
  double value() const { return static_cast<double>(a_) / static_cast<double>(b_); }
  // kappa = theta / (1 - theta) = a / (b - a)
  double kappa() const { return static_cast<double>(a_) / static_cast<double>(b_ - a_); }
  std::string str() const;

  friend bool operator==(const ThetaRational&, const ThetaRational&) = default;

 private:
  u64 a_;
  u64 b_;
};

enum class CountMethod { sieve, stratified };

const char* to_string(CountMethod m);
CountMethod parse_method(std::string_view text);

struct CountQuery {
  u64 x = 1;
  ThetaRational theta{1, 2};
  double z = 1.0;
  double Theta = 0.0;
  CountMethod method = CountMethod::sieve;
  // Opt-in floating theta; overrides `theta` and forces the guarded path.
  std::optional<double> theta_float;

  bool exact_predicate() const { return z == 1.0 && Theta == 0.0 && !theta_float; }
  double theta_value() const { return theta_float ? *theta_float : theta.value(); }
};

struct CountResult {
  u64 count = 0;
  u64 ambiguous = 0;
  std::chrono::duration<double> elapsed{};
  CountMethod method = CountMethod::sieve;
};

struct CountBudget {
  u64 max_sieve_x = 100'000'000'000ULL;
  u64 max_stratified_x = 1'000'000'000'000'000ULL;
};

struct CountOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  CountBudget budget{};
  SieveBudget memory{};
  // Prime tables are shared through dir/primes.bin when set.
  std::optional<std::filesystem::path> cache_dir;
};

// Relative guard band of the binary64 predicate.
inline constexpr double kGuardBand = 0x1p-40;

CountResult count_nuclear(u64 x, u64 y, const CountOptions& opts = {});

CountResult count_powered(const CountQuery& q, const CountOptions& opts = {});

CountResult count_powered_stratified(u64 x, ThetaRational theta,
                                     const CountOptions& opts = {});

// The unique coprime pair with n = l * m * k(m) and mu^2(l k(m)) = 1.
struct Decomposition {
  u64 l = 1;
  u64 m = 1;

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

Decomposition decompose(u64 n);

// Same, from precomputed radicals: k(n) and k(n / k(n)).
inline Decomposition decompose_with(u64 n, u64 rad_n, u64 rad_m) {
  return {rad_n / rad_m, n / rad_n};
}

// Number of w = 8^l n^(l-1) m^l with squarefree n, m in the constructive
// intervals; every w is checked to be a member of S_theta(x).
u64 lower_bound_W(u64 x, ThetaRational theta);

// (sum_{m<=x} m/k(m)) / (sum_{m<=x} x/k(m)). The numerator is summed exactly
// in 128-bit integers, the denominator in compensated long double.
double erdos_ratio(u64 x, const CountOptions& opts = {});

}  // namespace nuclear
