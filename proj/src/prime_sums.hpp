#pragma once

// Sums over primes of smooth, decreasing terms f(p).
//
// The part p <= P is summed directly. The part p > P is estimated by
// Stieltjes integration against Riemann's R(t), which follows pi(t) much more
// closely than li(t), plus the exact boundary correction -f(P)(pi(P) - R(P)).
// Independently of the estimate, callers bound the omitted part with the
// envelope pi(t) < 1.25506 t / log t.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace nuclear::detail {

// Neumaier compensated summation.
template <class T>
class BasicCompensatedSum {
 public:
  void add(T v) {
    const T t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

using CompensatedSum = BasicCompensatedSum<double>;

inline constexpr double kRosserSchoenfeld = 1.25506;

struct PrimeSumContext {
  std::uint64_t limit = 0;
  std::vector<double> primes;
  std::vector<double> logs;
  double pi_limit = 0;   // pi(limit)
  double r_limit = 0;    // R(limit)

  // Shared, immutable context for a given truncation; built on first use.
  static std::shared_ptr<const PrimeSumContext> get(std::uint64_t limit);
};

// Riemann's R(x) by the Gram series.
double riemann_r(double x);

// e^{-u} * sum_{k>=1} u^k / (k! zeta(k+1)), so that the prime density per unit
// of u = log t is e^u rho(u) / u.
double prime_density_factor(double u);

// Estimate of sum_{p > P} f(p).
//   scaled(u)   = e^u f(e^u), evaluated without overflow for large u
//   f_at_limit  = f(P)
//   decay       = exponential decay rate of scaled(u) in u (> 0)
double prime_tail_estimate(const PrimeSumContext& ctx,
                           const std::function<double(double)>& scaled,
                           double f_at_limit, double decay);

// Upper bounds for sum_{p > P} of t^{-1-s} (log t)^j, j = 0, 1, 2, from the
// prime counting envelope.
double envelope_power_sum(double P, double s);
double envelope_log_power_sum(double P, double s);
double envelope_log2_power_sum(double P, double s);

}  // namespace nuclear::detail
