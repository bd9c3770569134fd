#pragma once

// Command-line plans: argument parsing into a fully resolved grid, and the
// fail-soft execution of that grid into a CompareReport.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nuclear/analytic.hpp"
#include "nuclear/counts.hpp"
#include "nuclear/report.hpp"

namespace nuclear {

enum class Command { count, estimate, compare, saddle, validate };

const char* to_string(Command c);

struct GridPoint {
  double x = 1;
  u64 x_int = 1;  // floor(x), the bound used by exact counts
  ThetaKey theta;
  double z = 1;
  double Theta = 0;
};

inline constexpr double kMaxPlanX = 1e18;

struct Plan {
  Command command = Command::count;
  std::vector<GridPoint> grid;
  EvalConfig cfg;
  CountMethod method = CountMethod::sieve;
  double eps = 0.1;
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::csv;
  bool strict = false;
  bool no_timing = false;
  std::optional<std::filesystem::path> cache_dir;
  unsigned threads = 0;  // 0 = hardware concurrency
  CountBudget budget;
};

// args excludes the program name. Throws Error(usage) naming the offending
// flag. --cache-dir falls back to $NUCLEAR_CACHE_DIR.
Plan build_plan(const std::vector<std::string>& args);

// "lo:hi:xK" -> lo, lo K, lo K^2, ... <= hi.
std::vector<double> expand_grid(const std::string& text);

// One row per grid point, sorted. Per-row failures are recorded in
// CompareRow::error; with plan.strict the first failure is rethrown after the
// grid has run.
CompareReport execute_plan(const Plan& plan);

// Built-in self checks for `nuclear validate`; prints one PASS/FAIL line per
// check and returns true when all pass.
bool run_validation(const Plan& plan, std::ostream& out);

}  // namespace nuclear
