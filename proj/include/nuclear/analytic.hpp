#pragma once

// Analytic side: the Dirichlet series G(s) = (6/pi^2) sum 1/(psi(m) m^s) and
// g = log G on the real axis, the saddle point sigma_v with g'(sigma_v) = -v,
// the series F(v) and H_theta(x), and the estimators built from them.
//
// Sums over primes are split at cfg.prime_limit = P. Every value comes with a
// `tail`: an upper bound for the part that was not summed. In extrapolated
// mode an estimate of that part (integration against Riemann's R) is added to
// the value, in bounded mode it is left out and the call fails when the bound
// exceeds tol.

#include <cstdint>

#include "nuclear/counts.hpp"

namespace nuclear {

enum class TailMode { bounded, extrapolated };

struct EvalConfig {
  std::uint64_t prime_limit = 1'000'000;
  // Largest m summed directly in F and H.
  std::uint64_t series_limit = std::uint64_t{1} << 24;
  TailMode tail_mode = TailMode::extrapolated;
  double tol = 1e-9;
  // Admissible |log z| in units of log log x for predict_ratio.
  double log_z_slack = 2.0;

  // Throws Error(invalid_argument) unless prime_limit >= 1000, tol > 0 and
  // series_limit >= 1.
  void validate() const;
};

struct SeriesValue {
  double value = 0;
  double tail = 0;
};

// log G(sigma), including the factor 6/pi^2.
SeriesValue log_G(double sigma, const EvalConfig& cfg = {});

struct GDerivatives {
  SeriesValue g1;  // g'(sigma) < 0
  SeriesValue g2;  // g''(sigma) > 0
};

GDerivatives g_derivatives(double sigma, const EvalConfig& cfg = {});

struct SaddlePoint {
  double v = 0;
  double sigma = 0;
  double residual = 0;  // g'(sigma) + v
  double g2 = 0;
  // Bound on the shift of sigma caused by the prime truncation.
  double sigma_tail = 0;
  int iterations = 0;
};

SaddlePoint solve_saddle(double v, const EvalConfig& cfg = {});

// F(v) = (6/pi^2) sum_m min(1, e^v/m) / psi(m).
SeriesValue F_series(double v, const EvalConfig& cfg = {});

// H_theta(x) = (6/(pi^2 x^theta)) sum_m m^kappa min(1, x m^(-kappa-1)) / psi(m).
SeriesValue H_series(ThetaRational theta, double x, const EvalConfig& cfg = {});

struct EstimateResult {
  double s7 = 0;
  double s8 = 0;
  double alpha = 0;  // sigma_v at v = (1 - theta) log x
  double F_v = 0;
  double H_v = 0;
  double beta = 0;   // log(s8 / x^theta) / log x
  double v = 0;
  // Relative uncertainty of s7 from all truncations.
  double rel_tail = 0;
};

EstimateResult estimate_powered(ThetaRational theta, double x, const EvalConfig& cfg = {});

enum class PredictMode {
  simple,          // z^theta
  refined,         // z^(theta + (1 - theta) alpha_theta(x))
  refined_alpha0,  // z^(theta + (1 - theta) alpha_0(x)), alpha_0 = sigma at v = log x
  log_power,       // (log x)^Theta
  kernel_scale,    // z
};

const char* to_string(PredictMode mode);

double predict_ratio(ThetaRational theta, double x, double z, double Theta, PredictMode mode,
                     const EvalConfig& cfg = {});

// x^(theta + eps) prod_p (1 + 1/(p (p^eps - 1))), with the prime tail replaced
// by its upper bound so the result is always an upper bound for S_theta(x).
double rankin_bound(ThetaRational theta, double x, double eps, const EvalConfig& cfg = {});

struct ErrorSeries {
  double E = 0;
  double ratio = 0;  // E / (x^theta F(v))
  double sigma = 0;
  double gamma = 0;
  double log_tail = 0;  // tail of log E
};

// E = y^(1-gamma) (x/y)^sigma prod_p (1 + p^gamma r(p; gamma) / (p (p^sigma - 1)))
// with y = x^theta, sigma = sigma_v, gamma = sigma - 1/log y.
ErrorSeries E_bound(ThetaRational theta, double x, const EvalConfig& cfg = {});

struct AsymptoticForms {
  double sigma_approx = 0;  // sqrt(2 / (v log v))
  double logF_approx = 0;   // sqrt(8 v / log v)
};

AsymptoticForms asymptotic_forms(double v);

}  // namespace nuclear
