#include "prime_sums.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "nuclear/arith.hpp"
#include "nuclear/error.hpp"

namespace nuclear::detail {
namespace {

constexpr int kZetaTerms = 512;

// zeta(s) - 1 without cancellation for large s.
double zeta_minus_one(double s) {
  if (s < 8.0) return std::riemann_zeta(s) - 1.0;
  constexpr int n_cut = 32;
  double sum = 0.0;
  for (int n = n_cut - 1; n >= 2; --n) sum += std::pow(static_cast<double>(n), -s);
  const double N = n_cut;
  sum += std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s) +
         s * std::pow(N, -s - 1.0) / 12.0;
  return sum;
}

struct ZetaTable {
  // at[k] = 1 - 1/zeta(k+1), inv[k] = 1/zeta(k+1), for k >= 1
  std::array<double, kZetaTerms> at{};
  std::array<double, kZetaTerms> inv{};
  ZetaTable() {
    for (int k = 1; k < kZetaTerms; ++k) {
      const double zm1 = zeta_minus_one(k + 1.0);
      at[k] = zm1 / (1.0 + zm1);
      inv[k] = 1.0 / (1.0 + zm1);
    }
  }
};

const ZetaTable& zeta_table() {
  static const ZetaTable table;
  return table;
}

}  // namespace

double riemann_r(double x) {
  if (!(x > 0)) fail(ErrorKind::invalid_argument, "riemann_r: x must be positive");
  const double u = std::log(x);
  const auto& z = zeta_table();
  CompensatedSum sum;
  sum.add(1.0);
  double t = 1.0;
  for (int k = 1; k < kZetaTerms; ++k) {
    t *= u / k;
    const double term = t * z.inv[k] / k;
    sum.add(term);
    if (k > u && std::abs(term) < 1e-18 * std::abs(sum.value())) break;
  }
  return sum.value();
}

double prime_density_factor(double u) {
  if (u > 120.0) return 1.0 - std::exp(-u);
  const auto& z = zeta_table();
  double t = 1.0;
  double acc = 0.0;
  for (int k = 1; k < kZetaTerms; ++k) {
    t *= u / k;
    const double term = t * z.at[k];
    acc += term;
    if (k > u && term < 1e-18 * acc) break;
  }
  return 1.0 - std::exp(-u) - std::exp(-u) * acc;
}

std::shared_ptr<const PrimeSumContext> PrimeSumContext::get(std::uint64_t limit) {
  static std::mutex mutex;
  static std::map<std::uint64_t, std::shared_ptr<const PrimeSumContext>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(limit); it != cache.end()) return it->second;

  auto ctx = std::make_shared<PrimeSumContext>();
  ctx->limit = limit;
  const PrimeTable table = generate_primes(limit);
  ctx->primes.reserve(table.primes.size());
  ctx->logs.reserve(table.primes.size());
  for (u64 p : table.primes) {
    ctx->primes.push_back(static_cast<double>(p));
    ctx->logs.push_back(std::log(static_cast<double>(p)));
  }
  ctx->pi_limit = static_cast<double>(table.primes.size());
  ctx->r_limit = riemann_r(static_cast<double>(limit));
  cache.emplace(limit, ctx);
  return ctx;
}

double prime_tail_estimate(const PrimeSumContext& ctx,
                           const std::function<double(double)>& scaled,
                           double f_at_limit, double decay) {
  const double u0 = std::log(static_cast<double>(ctx.limit));
  // w = decay * (u - u0) puts the decay of every integrand on the same scale.
  auto integrand = [&](double w) {
    const double u = u0 + w / decay;
    const double s = scaled(u);
    if (s == 0.0) return 0.0;
    return s * prime_density_factor(u) / (u * decay);
  };
  boost::math::quadrature::exp_sinh<double> quad;
  double error = 0.0;
  const double integral =
      quad.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                     1e-12, &error);
  if (!std::isfinite(integral)) fail(ErrorKind::numeric, "prime tail quadrature diverged");
  return integral + f_at_limit * (ctx.r_limit - ctx.pi_limit);
}

double envelope_power_sum(double P, double s) {
  return kRosserSchoenfeld * (1.0 + s) * std::pow(P, -s) / (s * std::log(P));
}

double envelope_log_power_sum(double P, double s) {
  return kRosserSchoenfeld * (1.0 + s) * std::pow(P, -s) / s;
}

double envelope_log2_power_sum(double P, double s) {
  return kRosserSchoenfeld * (1.0 + s) * std::pow(P, -s) * (s * std::log(P) + 1.0) /
         (s * s);
}

}  // namespace nuclear::detail
