#include "nuclear/plan.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "nuclear/error.hpp"
#include "segment_fold.hpp"

namespace nuclear {
namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void usage(const std::string& flag, const std::string& msg) {
  fail(ErrorKind::usage, flag + ": " + msg);
}

double parse_real(const std::string& flag, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    usage(flag, "expected a number, got '" + text + "'");
  }
  return v;
}

// Snaps values that are integers up to rounding (1e4 * 10^k and the like).
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)) ? r : v;
}

GridPoint make_point(double x, const std::string& flag) {
  if (!(x >= 1) || x > kMaxPlanX) {
    usage(flag, "x must lie in [1, 1e18], got " + std::to_string(x));
  }
  GridPoint g;
  g.x = x;
  g.x_int = static_cast<u64>(std::floor(x));
  return g;
}

// Exact integer parse when possible so that x beyond 2^53 keeps every digit.
GridPoint parse_x(const std::string& text) {
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size() && !text.empty()) {
    GridPoint g = make_point(static_cast<double>(v), "--x");
    g.x_int = v;
    return g;
  }
  return make_point(parse_real("--x", text), "--x");
}

CountOptions count_options(const Plan& plan, unsigned threads) {
  CountOptions opts;
  opts.threads = threads;
  opts.budget = plan.budget;
  opts.cache_dir = plan.cache_dir;
  return opts;
}

bool exact_feasible(const Plan& plan, const GridPoint& g) {
  const bool exact_pred = g.z == 1.0 && g.Theta == 0.0 && !g.theta.real;
  if (plan.method == CountMethod::stratified) {
    return exact_pred && g.x_int <= plan.budget.max_stratified_x;
  }
  return g.x_int <= plan.budget.max_sieve_x;
}

CountQuery query_for(const Plan& plan, const GridPoint& g) {
  CountQuery q;
  q.x = g.x_int;
  q.theta = g.theta.rational;
  q.theta_float = g.theta.real;
  q.z = g.z;
  q.Theta = g.Theta;
  q.method = plan.method;
  return q;
}

void fill_estimate(const Plan& plan, const GridPoint& g, CompareRow& row) {
  if (g.theta.real) {
    throw Error(ErrorKind::unsupported, "estimates need a rational theta");
  }
  const EstimateResult e = estimate_powered(g.theta.rational, g.x, plan.cfg);
  // B(x, z) ~ z S(x) and S_{theta,T}(x) ~ (log x)^T S(x).
  const double factor = g.z * std::pow(std::log(g.x), g.Theta);
  row.s7 = e.s7 * factor;
  row.s8 = e.s8 * factor;
  row.sigma_v = e.alpha;
  row.F_v = e.F_v;
}

void append_error(CompareRow& row, const std::string& msg) {
  if (!row.error.empty()) row.error += "; ";
  row.error += msg;
}

CompareRow run_row(const Plan& plan, const GridPoint& g, unsigned count_threads,
                   std::exception_ptr& first_error) {
  CompareRow row;
  row.x = g.x;
  row.theta = g.theta;
  row.z = g.z;
  row.Theta = g.Theta;
  const auto start = Clock::now();
  auto guarded = [&](auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      append_error(row, e.what());
      if (!first_error) first_error = std::current_exception();
    }
  };

  switch (plan.command) {
    case Command::count:
      guarded([&] {
        const CountResult r = count_powered(query_for(plan, g), count_options(plan, count_threads));
        row.exact = r.count;
        row.ambiguous = r.ambiguous;
      });
      break;
    case Command::estimate:
      guarded([&] { fill_estimate(plan, g, row); });
      break;
    case Command::compare:
      if (exact_feasible(plan, g)) {
        guarded([&] {
          const CountResult r =
              count_powered(query_for(plan, g), count_options(plan, count_threads));
          row.exact = r.count;
          row.ambiguous = r.ambiguous;
        });
      }
      if (g.x >= 27) guarded([&] { fill_estimate(plan, g, row); });
      if (row.exact && row.s7) row.ratio_s7 = static_cast<double>(*row.exact) / *row.s7;
      if (row.exact && row.s8) row.ratio_s8 = static_cast<double>(*row.exact) / *row.s8;
      break;
    case Command::saddle:
      guarded([&] {
        const double v = (1 - g.theta.value()) * std::log(g.x);
        row.sigma_v = solve_saddle(v, plan.cfg).sigma;
        if (std::exp(v) <= static_cast<double>(plan.cfg.series_limit)) {
          row.F_v = F_series(v, plan.cfg).value;
        }
      });
      break;
    case Command::validate:
      break;
  }
  const std::chrono::duration<double, std::milli> ms = Clock::now() - start;
  row.elapsed_ms = plan.no_timing ? 0.0 : ms.count();
  return row;
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::count: return "count";
    case Command::estimate: return "estimate";
    case Command::compare: return "compare";
    case Command::saddle: return "saddle";
    case Command::validate: return "validate";
  }
  return "?";
}

std::vector<double> expand_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c2 == std::string::npos || c2 + 1 >= text.size() || text[c2 + 1] != 'x') {
    usage("--x-grid", "expected lo:hi:xK, got '" + text + "'");
  }
  const double lo = parse_real("--x-grid", text.substr(0, c1));
  const double hi = parse_real("--x-grid", text.substr(c1 + 1, c2 - c1 - 1));
  const double k = parse_real("--x-grid", text.substr(c2 + 2));
  if (!(lo >= 1) || !(hi >= lo)) usage("--x-grid", "need 1 <= lo <= hi in '" + text + "'");
  if (!(k > 1)) usage("--x-grid", "step factor must exceed 1 in '" + text + "'");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = snap(lo * std::pow(k, i));
    if (v > hi * (1 + 1e-12)) break;
    out.push_back(v);
    if (out.size() > 100000) usage("--x-grid", "more than 100000 points");
  }
  return out;
}

Plan build_plan(const std::vector<std::string>& args) {
  CLI::App app{"Exact and asymptotic counts of integers with small squarefree kernel", "nuclear"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.set_help_flag();
  app.set_help_all_flag();

  std::vector<std::string> xs, grids, thetas;
  std::vector<double> theta_floats;
  std::vector<double> zs, Thetas;
  std::string method = "sieve", format = "csv", tail_mode = "extrapolated";
  std::string out, cache_dir;
  Plan plan;

  app.add_option("--x", xs, "upper bound x (repeatable)");
  app.add_option("--x-grid", grids, "multiplicative grid lo:hi:xK (repeatable)");
  app.add_option("--theta", thetas, "exponent as a rational a/b (repeatable)");
  app.add_option("--theta-float", theta_floats, "exponent as a real, guarded predicate");
  app.add_option("--z", zs, "scale z in k(n) <= z n^theta (repeatable)");
  app.add_option("--Theta", Thetas, "log power in k(n) <= n^theta (log n)^Theta (repeatable)");
  app.add_option("--method", method, "sieve or stratified");
  app.add_option("--eps", plan.eps, "Rankin exponent");
  app.add_option("--tol", plan.cfg.tol, "tolerance for analytic evaluations");
  app.add_option("--prime-limit", plan.cfg.prime_limit, "truncation of prime sums");
  app.add_option("--series-limit", plan.cfg.series_limit, "truncation of sums over m");
  app.add_option("--tail-mode", tail_mode, "bounded or extrapolated");
  app.add_option("--threads", plan.threads, "worker threads (0 = all cores)");
  app.add_option("--out", out, "output file (default stdout)");
  app.add_option("--format", format, "csv or json");
  app.add_flag("--strict", plan.strict, "exit 2 on the first failing row");
  app.add_flag("--no-timing", plan.no_timing, "write elapsed_ms as 0");
  app.add_option("--cache-dir", cache_dir, "prime cache directory")->envname("NUCLEAR_CACHE_DIR");

  for (Command c : {Command::count, Command::estimate, Command::compare, Command::saddle,
                    Command::validate}) {
    app.add_subcommand(to_string(c))->callback([&plan, c] { plan.command = c; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    fail(ErrorKind::usage, e.what());
  }

  plan.method = [&] {
    try {
      return parse_method(method);
    } catch (const Error& e) {
      usage("--method", e.what());
    }
  }();
  try {
    plan.format = parse_format(format);
  } catch (const Error& e) {
    usage("--format", e.what());
  }
  if (tail_mode == "bounded") {
    plan.cfg.tail_mode = TailMode::bounded;
  } else if (tail_mode == "extrapolated") {
    plan.cfg.tail_mode = TailMode::extrapolated;
  } else {
    usage("--tail-mode", "expected bounded or extrapolated, got '" + tail_mode + "'");
  }
  if (plan.cfg.prime_limit < 1000) usage("--prime-limit", "must be at least 1000");
  if (!(plan.cfg.tol > 0)) usage("--tol", "must be positive");
  if (plan.cfg.series_limit < 1) usage("--series-limit", "must be at least 1");
  if (!(plan.eps > 0)) usage("--eps", "must be positive");
  if (!out.empty()) plan.out = out;
  if (!cache_dir.empty()) plan.cache_dir = cache_dir;

  std::vector<ThetaKey> theta_keys;
  for (const auto& t : thetas) {
    try {
      theta_keys.push_back({ThetaRational::parse(t), std::nullopt});
    } catch (const Error& e) {
      usage("--theta", e.what());
    }
  }
  for (double t : theta_floats) {
    if (!(t > 0 && t < 1)) usage("--theta-float", "theta must satisfy 0 < theta < 1");
    theta_keys.push_back({ThetaRational{1, 2}, t});
  }
  if (theta_keys.empty()) theta_keys.push_back({});
  if (zs.empty()) zs.push_back(1.0);
  if (Thetas.empty()) Thetas.push_back(0.0);
  for (double z : zs) {
    if (!(z > 0) || !std::isfinite(z)) usage("--z", "must be positive");
  }
  for (double T : Thetas) {
    if (!std::isfinite(T)) usage("--Theta", "must be finite");
  }

  std::vector<GridPoint> xpoints;
  for (const auto& x : xs) xpoints.push_back(parse_x(x));
  for (const auto& g : grids) {
    for (double x : expand_grid(g)) xpoints.push_back(make_point(x, "--x-grid"));
  }

  if (plan.command != Command::validate) {
    if (xpoints.empty()) usage("--x", "at least one --x or --x-grid is required");
    for (const auto& th : theta_keys) {
      for (const auto& xp : xpoints) {
        for (double z : zs) {
          for (double T : Thetas) {
            GridPoint g = xp;
            g.theta = th;
            g.z = z;
            g.Theta = T;
            plan.grid.push_back(g);
          }
        }
      }
    }
  }
  return plan;
}

CompareReport execute_plan(const Plan& plan) {
  const std::size_t n = plan.grid.size();
  std::vector<CompareRow> rows(n);
  std::vector<std::exception_ptr> errors(n);
  const unsigned hw = detail::resolve_threads(plan.threads);
  const unsigned workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(hw, n)));
  const unsigned count_threads = std::max(1u, hw / workers);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      rows[i] = run_row(plan, plan.grid[i], count_threads, errors[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }

  CompareReport report;
  report.rows = std::move(rows);
  report.sort();
  if (plan.strict) {
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return report;
}

bool run_validation(const Plan& plan, std::ostream& out) {
  bool all = true;
  auto check = [&](const std::string& name, auto&& fn) {
    bool ok = false;
    std::string detail;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    all = all && ok;
    out << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) out << "  (" << detail << ")";
    out << '\n';
  };
  auto near = [](double a, double b, double tol, std::string& d) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "got %.17g, want %.17g", a, b);
    d = buf;
    return std::abs(a - b) <= tol;
  };
  const EvalConfig& cfg = plan.cfg;
  CountOptions opts = count_options(plan, 0);
  const double pi2 = std::numbers::pi * std::numbers::pi;

  check("F(0) = 1", [&](std::string& d) { return near(F_series(0, cfg).value, 1, 1e-9, d); });
  check("F(log 2) = 2 - 6/pi^2", [&](std::string& d) {
    return near(F_series(std::log(2.0), cfg).value, 2 - 6 / pi2, 1e-9, d);
  });
  check("log G(1) = 0", [&](std::string& d) { return near(log_G(1, cfg).value, 0, 1e-9, d); });
  for (auto t : {ThetaRational{1, 3}, ThetaRational{1, 2}, ThetaRational{2, 3}}) {
    check("H(" + t.str() + ", 1) = 1",
          [&](std::string& d) { return near(H_series(t, 1, cfg).value, 1, 1e-9, d); });
  }
  check("saddle round trip at sigma = 0.5", [&](std::string& d) {
    const double v = -g_derivatives(0.5, cfg).g1.value;
    return near(solve_saddle(v, cfg).sigma, 0.5, 1e-8, d);
  });
  check("N(10, 2) = 4", [&](std::string& d) {
    return near(static_cast<double>(count_nuclear(10, 2, opts).count), 4, 0, d);
  });
  check("S_1/2(10) = 4", [&](std::string& d) {
    CountQuery q;
    q.x = 10;
    return near(static_cast<double>(count_powered(q, opts).count), 4, 0, d);
  });
  check("N(x, x) = x for x = 10^4", [&](std::string& d) {
    return near(static_cast<double>(count_nuclear(10000, 10000, opts).count), 10000, 0, d);
  });
  for (auto t : {ThetaRational{1, 3}, ThetaRational{1, 2}, ThetaRational{2, 3}}) {
    check("sieve = stratified at x = 10^5, theta = " + t.str(), [&](std::string& d) {
      CountQuery q;
      q.x = 100000;
      q.theta = t;
      const u64 a = count_powered(q, opts).count;
      const u64 b = count_powered_stratified(q.x, t, opts).count;
      d = std::to_string(a) + " vs " + std::to_string(b);
      return a == b;
    });
  }
  return all;
}

}  // namespace nuclear
