#include "nuclear/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nuclear/arith.hpp"
#include "nuclear/error.hpp"
#include "prime_sums.hpp"

namespace nuclear {
namespace {

using detail::CompensatedSum;
using detail::PrimeSumContext;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSixOverPi2 = 6.0 / (std::numbers::pi * std::numbers::pi);
constexpr long double kZeta2 = std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / 6;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_sigma(double sigma, const char* op) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    fail(ErrorKind::invalid_argument, std::string(op) + ": sigma must be positive, got " + fmt(sigma));
  }
}

void check_bounded(const SeriesValue& s, const EvalConfig& cfg, const char* what) {
  if (cfg.tail_mode == TailMode::bounded && s.tail > cfg.tol * std::max(1.0, std::abs(s.value))) {
    fail(ErrorKind::precision, std::string(what) + ": prime tail bound " + fmt(s.tail) +
                                   " exceeds tol " + fmt(cfg.tol) + " at prime_limit " +
                                   std::to_string(cfg.prime_limit) +
                                   "; increase the prime limit");
  }
}

// Sum of term(p, log p) over p <= P, and in extrapolated mode an estimate of
// the rest clamped to [0, bound].
struct PrimeSum {
  double partial = 0;
  double estimate = 0;
  double magnitude = 0;  // sum of |terms|, for the rounding allowance
};

template <class Term>
PrimeSum sum_over_primes(const PrimeSumContext& ctx, Term term,
                         const std::function<double(double)>& scaled, double decay,
                         double bound, TailMode mode) {
  CompensatedSum sum;
  double magnitude = 0;
  for (std::size_t i = 0; i < ctx.primes.size(); ++i) {
    const double t = term(ctx.primes[i], ctx.logs[i]);
    sum.add(t);
    magnitude += std::abs(t);
  }
  PrimeSum out{sum.value(), 0.0, magnitude};
  if (mode == TailMode::extrapolated && bound > 0) {
    const double P = static_cast<double>(ctx.limit);
    const double est = detail::prime_tail_estimate(ctx, scaled, term(P, std::log(P)), decay);
    out.estimate = std::clamp(est, 0.0, bound);
  }
  return out;
}

double rounding(const PrimeSum& s) { return 4 * kEps * (s.magnitude + 1.0); }

// log(1 + 1/((p+1)(p^sigma - 1)))
double log_g_term(double sigma, double p, double L) {
  const double A = std::expm1(sigma * L);
  return std::log1p(1.0 / ((p + 1.0) * A));
}

double log_g_scaled(double sigma, double u) {
  const double em = std::exp(-u);
  const double A = std::expm1(sigma * u);
  const double a1 = 1.0 / ((1.0 + em) * A);
  const double q = em * a1;
  const double ratio = q == 0.0 ? 1.0 : std::log1p(q) / q;
  return a1 * ratio;
}

// Terms of -g' and g''.
struct DerivTerms {
  double h = 0;
  double h2 = 0;
};

DerivTerms deriv_terms(double sigma, double p, double L) {
  const double A = std::expm1(sigma * L);
  const double B = 1.0 + (p + 1.0) * A;
  if (!std::isfinite(B)) return {};
  const double r = (A + 1.0) / A;  // w / A
  const double s = (p + 1.0) * A / B;
  return {r * L / B, r * L * L * (1.0 / (A * B) + s * r / B)};
}

DerivTerms deriv_scaled(double sigma, double u) {
  const double A = std::expm1(sigma * u);
  if (!std::isfinite(A)) return {};
  const double em = std::exp(-u);
  const double c = -1.0 / std::expm1(-sigma * u);
  const double beta = A + em / (1.0 + em);
  const double a_over_beta = 1.0 / (1.0 + em / ((1.0 + em) * A));
  return {u * c / ((1.0 + em) * beta),
          u * u * c / (1.0 + em) * (1.0 / (A * beta) + c * a_over_beta / beta)};
}

std::shared_ptr<const PrimeSumContext> context(const EvalConfig& cfg) {
  cfg.validate();
  return PrimeSumContext::get(cfg.prime_limit);
}

// 1/(1 - P^-s)
double envelope_c(double P, double s) { return -1.0 / std::expm1(-s * std::log(P)); }

struct PsiSums {
  long double head = 0;  // sum_{m <= K} weight(m) / psi(m)
  long double b_k = 0;   // sum_{m <= K} 1 / (m psi(m))
  long double b_n = 0;   // sum_{m <= N} 1 / (m psi(m)), N >= K
};

// weight(m) = m^kappa.
PsiSums psi_sums(u64 K, u64 N, double kappa) {
  PsiSums out;
  if (N == 0) return out;
  const PrimeTable primes = generate_primes(std::max<u64>(isqrt(N), 2));
  detail::BasicCompensatedSum<long double> head, bk, bn;
  constexpr u64 span = u64{1} << 16;
  const bool unit_weight = kappa == 0.0;
  const bool linear_weight = kappa == 1.0;
  for (u64 lo = 1; lo <= N; lo += span) {
    const u64 hi = std::min(N, lo + span - 1);
    const ArithSegment seg = sieve_segment(lo, hi, primes);
    for (u64 m = lo; m <= hi; ++m) {
      const long double psi = static_cast<long double>(seg.psi_of(m));
      const long double md = static_cast<long double>(m);
      const long double inv = 1.0L / (md * psi);
      bn.add(inv);
      if (m <= K) {
        bk.add(inv);
        long double w = unit_weight     ? 1.0L
                        : linear_weight ? md
                                        : std::pow(md, static_cast<long double>(kappa));
        head.add(w / psi);
      }
    }
  }
  out.head = head.value();
  out.b_k = bk.value();
  out.b_n = bn.value();
  return out;
}

// (6/pi^2) [head + X (pi^2/6 - B(K))] and its bounded-mode counterpart, where
// the identity sum_m 1/(m psi(m)) = pi^2/6 closes the tail exactly.
SeriesValue psi_series(u64 K, double X, double kappa, const EvalConfig& cfg, const char* what) {
  if (K > cfg.series_limit) {
    fail(ErrorKind::precision, std::string(what) + ": needs " + std::to_string(K) +
                                   " terms, over the series limit " +
                                   std::to_string(cfg.series_limit));
  }
  const bool bounded = cfg.tail_mode == TailMode::bounded;
  const u64 N = bounded ? std::max<u64>(K, cfg.series_limit) : K;
  const PsiSums s = psi_sums(K, N, kappa);
  const long double Xl = X;
  SeriesValue out;
  const double round = 8 * kEps * kSixOverPi2 * static_cast<double>(s.head) +
                       8 * static_cast<double>(std::numeric_limits<long double>::epsilon() * Xl * kZeta2);
  if (bounded) {
    const long double mid = s.b_n - s.b_k;
    out.value = static_cast<double>(kSixOverPi2 * (s.head + Xl * mid));
    out.tail = static_cast<double>(kSixOverPi2 * Xl * (kZeta2 - s.b_n)) + round;
    if (out.tail > cfg.tol * std::max(1.0, out.value)) {
      fail(ErrorKind::precision, std::string(what) + ": omitted part " + fmt(out.tail) +
                                     " exceeds tol; increase the series limit");
    }
  } else {
    out.value = static_cast<double>(kSixOverPi2 * (s.head + Xl * (kZeta2 - s.b_k)));
    out.tail = round;
  }
  return out;
}

}  // namespace

void EvalConfig::validate() const {
  if (prime_limit < 1000) {
    fail(ErrorKind::invalid_argument, "prime_limit must be at least 1000");
  }
  if (!(tol > 0)) fail(ErrorKind::invalid_argument, "tol must be positive");
  if (series_limit < 1) fail(ErrorKind::invalid_argument, "series_limit must be at least 1");
  if (!(log_z_slack > 0)) fail(ErrorKind::invalid_argument, "log_z_slack must be positive");
}

SeriesValue log_G(double sigma, const EvalConfig& cfg) {
  require_sigma(sigma, "log_G");
  const auto ctx = context(cfg);
  const double P = static_cast<double>(cfg.prime_limit);
  const double bound =
      envelope_c(P, sigma) * detail::envelope_power_sum(P, sigma);
  const PrimeSum s = sum_over_primes(
      *ctx, [sigma](double p, double L) { return log_g_term(sigma, p, L); },
      [sigma](double u) { return log_g_scaled(sigma, u); }, sigma, bound, cfg.tail_mode);
  SeriesValue out{std::log(kSixOverPi2) + s.partial + s.estimate, bound + rounding(s)};
  check_bounded(out, cfg, "log_G");
  return out;
}

GDerivatives g_derivatives(double sigma, const EvalConfig& cfg) {
  require_sigma(sigma, "g_derivatives");
  const auto ctx = context(cfg);
  const double P = static_cast<double>(cfg.prime_limit);
  const double c = envelope_c(P, sigma);
  const double bound1 = c * c * detail::envelope_log_power_sum(P, sigma);
  const double bound2 = 2 * c * c * c * detail::envelope_log2_power_sum(P, sigma);

  CompensatedSum s1, s2;
  double mag1 = 0, mag2 = 0;
  for (std::size_t i = 0; i < ctx->primes.size(); ++i) {
    const DerivTerms t = deriv_terms(sigma, ctx->primes[i], ctx->logs[i]);
    s1.add(t.h);
    s2.add(t.h2);
    mag1 += t.h;
    mag2 += t.h2;
  }
  double est1 = 0, est2 = 0;
  if (cfg.tail_mode == TailMode::extrapolated) {
    const DerivTerms at_p = deriv_terms(sigma, P, std::log(P));
    est1 = std::clamp(detail::prime_tail_estimate(
                          *ctx, [sigma](double u) { return deriv_scaled(sigma, u).h; },
                          at_p.h, sigma),
                      0.0, bound1);
    est2 = std::clamp(detail::prime_tail_estimate(
                          *ctx, [sigma](double u) { return deriv_scaled(sigma, u).h2; },
                          at_p.h2, sigma),
                      0.0, bound2);
  }
  GDerivatives out;
  out.g1 = {-(s1.value() + est1), bound1 + 4 * kEps * (mag1 + 1.0)};
  out.g2 = {s2.value() + est2, bound2 + 4 * kEps * (mag2 + 1.0)};
  check_bounded(out.g1, cfg, "g'");
  check_bounded(out.g2, cfg, "g''");
  return out;
}

SaddlePoint solve_saddle(double v, const EvalConfig& cfg) {
  if (!(v > 0) || !std::isfinite(v)) {
    fail(ErrorKind::invalid_argument, "solve_saddle: v must be positive, got " + fmt(v));
  }
  constexpr double kLo = 1e-6;
  constexpr double kHi = 10.0;
  constexpr int kMaxIter = 200;

  int evals = 0;
  auto eval = [&](double sigma) {
    ++evals;
    return g_derivatives(sigma, cfg);
  };

  double sigma = v > std::numbers::e ? std::sqrt(2.0 / (v * std::log(v))) : 1.0;
  sigma = std::clamp(sigma, kLo, kHi);
  GDerivatives g = eval(sigma);
  double f = g.g1.value + v;

  // Bracket: f is increasing in sigma.
  double lo = kLo, hi = kHi;
  if (f < 0) {
    lo = sigma;
    double probe = sigma;
    for (;;) {
      probe = std::min(2 * probe, kHi);
      const GDerivatives gp = eval(probe);
      if (gp.g1.value + v >= 0) {
        hi = probe;
        break;
      }
      lo = probe;
      if (probe >= kHi) {
        fail(ErrorKind::numeric, "solve_saddle: no root below sigma=" + fmt(kHi) + " for v=" +
                                     fmt(v) + " (g'+v=" + fmt(gp.g1.value + v) + ")");
      }
    }
  } else {
    hi = sigma;
    double probe = sigma;
    for (;;) {
      probe = std::max(probe / 2, kLo);
      const GDerivatives gp = eval(probe);
      if (gp.g1.value + v <= 0) {
        lo = probe;
        break;
      }
      hi = probe;
      if (probe <= kLo) {
        fail(ErrorKind::numeric, "solve_saddle: no root above sigma=" + fmt(kLo) + " for v=" +
                                     fmt(v) + " (g'+v=" + fmt(gp.g1.value + v) + ")");
      }
    }
  }

  for (int it = 0; it < kMaxIter; ++it) {
    if (std::abs(f) <= cfg.tol) {
      SaddlePoint sp;
      sp.v = v;
      sp.sigma = sigma;
      sp.residual = f;
      sp.g2 = g.g2.value;
      sp.sigma_tail = (g.g1.tail + std::abs(f)) / g.g2.value;
      sp.iterations = evals;
      return sp;
    }
    if (f < 0) {
      lo = std::max(lo, sigma);
    } else {
      hi = std::min(hi, sigma);
    }
    if (hi - lo <= 4 * kEps * hi) break;
    double next = sigma - f / g.g2.value;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    sigma = next;
    g = eval(sigma);
    f = g.g1.value + v;
  }
  fail(ErrorKind::numeric, "solve_saddle: no convergence for v=" + fmt(v) + " after " +
                               std::to_string(evals) + " evaluations; sigma=" + fmt(sigma) +
                               " residual=" + fmt(f) + " bracket=[" + fmt(lo) + ", " + fmt(hi) +
                               "]");
}

SeriesValue F_series(double v, const EvalConfig& cfg) {
  cfg.validate();
  if (!(v >= 0) || !std::isfinite(v)) {
    fail(ErrorKind::invalid_argument, "F_series: v must be nonnegative, got " + fmt(v));
  }
  const double X = std::exp(v);
  if (!(X <= static_cast<double>(cfg.series_limit))) {
    fail(ErrorKind::precision, "F_series: e^v = " + fmt(X) + " exceeds the series limit " +
                                   std::to_string(cfg.series_limit));
  }
  return psi_series(static_cast<u64>(std::floor(X)), X, 0.0, cfg, "F_series");
}

SeriesValue H_series(ThetaRational theta, double x, const EvalConfig& cfg) {
  cfg.validate();
  if (!(x >= 1) || !std::isfinite(x)) {
    fail(ErrorKind::invalid_argument, "H_series: x must be at least 1, got " + fmt(x));
  }
  const long double expo = static_cast<long double>(theta.den() - theta.num()) /
                           static_cast<long double>(theta.den());
  const long double K = std::floor(std::pow(static_cast<long double>(x), expo));
  if (!(K <= static_cast<long double>(cfg.series_limit))) {
    fail(ErrorKind::precision, "H_series: x^(1-theta) = " + fmt(static_cast<double>(K)) +
                                   " exceeds the series limit " +
                                   std::to_string(cfg.series_limit));
  }
  SeriesValue s = psi_series(static_cast<u64>(K), x, theta.kappa(), cfg, "H_series");
  const double scale = std::pow(x, -theta.value());
  return {s.value * scale, s.tail * scale};
}

EstimateResult estimate_powered(ThetaRational theta, double x, const EvalConfig& cfg) {
  if (!(x >= 27) || !std::isfinite(x)) {
    fail(ErrorKind::invalid_argument, "estimate_powered: x must be at least 27, got " + fmt(x));
  }
  const double th = theta.value();
  const double lx = std::log(x);
  EstimateResult r;
  r.v = (1 - th) * lx;
  const SaddlePoint sp = solve_saddle(r.v, cfg);
  const SeriesValue F = F_series(r.v, cfg);
  const SeriesValue H = H_series(theta, x, cfg);
  const double xt = std::exp(th * lx);
  r.alpha = sp.sigma;
  r.F_v = F.value;
  r.H_v = H.value;
  r.s7 = xt * F.value * sp.sigma / th;
  r.s8 = xt * F.value / th * std::sqrt(2 / (1 - th)) / std::sqrt(lx * std::log(lx));
  r.beta = std::log(r.s8 / xt) / lx;
  r.rel_tail = sp.sigma_tail / sp.sigma + F.tail / F.value;
  return r;
}

const char* to_string(PredictMode mode) {
  switch (mode) {
    case PredictMode::simple: return "simple";
    case PredictMode::refined: return "refined";
    case PredictMode::refined_alpha0: return "refined_alpha0";
    case PredictMode::log_power: return "log_power";
    case PredictMode::kernel_scale: return "kernel_scale";
  }
  return "?";
}

double predict_ratio(ThetaRational theta, double x, double z, double Theta, PredictMode mode,
                     const EvalConfig& cfg) {
  cfg.validate();
  if (!(x >= 1e3) || !std::isfinite(x)) {
    fail(ErrorKind::invalid_argument, "predict_ratio: x must be at least 1000, got " + fmt(x));
  }
  if (!(z > 0) || !std::isfinite(z)) {
    fail(ErrorKind::invalid_argument, "predict_ratio: z must be positive, got " + fmt(z));
  }
  const double lx = std::log(x);
  const double window = cfg.log_z_slack * std::log(lx);
  if (std::abs(std::log(z)) > window) {
    fail(ErrorKind::range, "predict_ratio: |log z| = " + fmt(std::abs(std::log(z))) +
                               " outside the window " + fmt(window));
  }
  const double th = theta.value();
  switch (mode) {
    case PredictMode::simple:
      return std::pow(z, th);
    case PredictMode::refined:
      return std::pow(z, th + (1 - th) * solve_saddle((1 - th) * lx, cfg).sigma);
    case PredictMode::refined_alpha0:
      return std::pow(z, th + (1 - th) * solve_saddle(lx, cfg).sigma);
    case PredictMode::log_power:
      return std::pow(lx, Theta);
    case PredictMode::kernel_scale:
      return z;
  }
  fail(ErrorKind::invalid_argument, "predict_ratio: unknown mode");
}

double rankin_bound(ThetaRational theta, double x, double eps, const EvalConfig& cfg) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    fail(ErrorKind::invalid_argument, "rankin_bound: eps must be positive, got " + fmt(eps));
  }
  if (!(x >= 1) || !std::isfinite(x)) {
    fail(ErrorKind::invalid_argument, "rankin_bound: x must be at least 1, got " + fmt(x));
  }
  const auto ctx = context(cfg);
  const double P = static_cast<double>(cfg.prime_limit);
  const double bound = envelope_c(P, eps) * detail::envelope_power_sum(P, eps);
  // The tail is always replaced by its bound so the result stays an upper bound.
  const PrimeSum s = sum_over_primes(
      *ctx,
      [eps](double p, double L) { return std::log1p(1.0 / (p * std::expm1(eps * L))); },
      {}, eps, bound, TailMode::bounded);
  const double log_value = (theta.value() + eps) * std::log(x) + s.partial + bound + rounding(s);
  if (!(log_value < std::log(std::numeric_limits<double>::max()))) {
    fail(ErrorKind::range, "rankin_bound: result overflows binary64 (log = " + fmt(log_value) +
                               "); increase eps");
  }
  return std::exp(log_value);
}

ErrorSeries E_bound(ThetaRational theta, double x, const EvalConfig& cfg) {
  if (!(x >= 27) || !std::isfinite(x)) {
    fail(ErrorKind::invalid_argument, "E_bound: x must be at least 27, got " + fmt(x));
  }
  const auto ctx = context(cfg);
  const double th = theta.value();
  const double lx = std::log(x);
  const double log_y = th * lx;
  const double v = (1 - th) * lx;
  const SaddlePoint sp = solve_saddle(v, cfg);
  const double sigma = sp.sigma;
  const double gamma = sigma - 1.0 / log_y;
  if (!(gamma > 0)) {
    fail(ErrorKind::range, "E_bound: gamma = sigma - 1/log y = " + fmt(gamma) +
                               " is not positive; x is too small");
  }
  const double delta = sigma - gamma;
  const double P = static_cast<double>(cfg.prime_limit);
  const double bound = (1 + 4 * gamma / std::sqrt(P)) * envelope_c(P, sigma) *
                       detail::envelope_power_sum(P, delta);

  auto term = [sigma, gamma](double p, double L) {
    const double r = 1 + 4 * gamma / std::sqrt(p);
    return std::log1p(r * std::exp((gamma - 1) * L) / std::expm1(sigma * L));
  };
  auto scaled = [sigma, gamma](double u) {
    const double r = 1 + 4 * gamma * std::exp(-u / 2);
    const double c = -1.0 / std::expm1(-sigma * u);
    const double eq = r * c * std::exp(-(sigma - gamma) * u);
    const double q = eq * std::exp(-u);
    return q == 0.0 ? eq : eq * std::log1p(q) / q;
  };
  const PrimeSum s = sum_over_primes(*ctx, term, scaled, delta, bound, cfg.tail_mode);

  ErrorSeries out;
  out.sigma = sigma;
  out.gamma = gamma;
  out.log_tail = bound + rounding(s);
  if (cfg.tail_mode == TailMode::bounded && out.log_tail > cfg.tol) {
    fail(ErrorKind::precision, "E_bound: prime tail bound " + fmt(out.log_tail) +
                                   " exceeds tol; increase the prime limit");
  }
  const double log_E = (1 - gamma) * log_y + sigma * v + s.partial + s.estimate;
  const SeriesValue F = F_series(v, cfg);
  out.E = std::exp(log_E);
  out.ratio = std::exp(log_E - log_y - std::log(F.value));
  return out;
}

AsymptoticForms asymptotic_forms(double v) {
  if (!(v > std::numbers::e) || !std::isfinite(v)) {
    fail(ErrorKind::invalid_argument, "asymptotic_forms: v must exceed e, got " + fmt(v));
  }
  const double lv = std::log(v);
  return {std::sqrt(2 / (v * lv)), std::sqrt(8 * v / lv)};
}

}  // namespace nuclear
