// nuclear count|estimate|compare|saddle|validate [flags]
//
// Exit codes: 0 success, 1 usage error, 2 computation error under --strict
// (validate: 2 when any check fails).

#include <iostream>
#include <string>
#include <vector>

#include "nuclear/error.hpp"
#include "nuclear/plan.hpp"
#include "nuclear/report.hpp"

namespace {

constexpr const char* kUsage =
    "usage: nuclear count|estimate|compare|saddle|validate [--x N] [--x-grid lo:hi:xK]\n"
    "       [--theta a/b] [--theta-float t] [--z Z] [--Theta T] [--method sieve|stratified]\n"
    "       [--eps E] [--tol T] [--prime-limit P] [--series-limit M]\n"
    "       [--tail-mode bounded|extrapolated] [--threads N] [--out PATH]\n"
    "       [--format csv|json] [--strict] [--no-timing] [--cache-dir DIR]\n";

}  // namespace

int main(int argc, char** argv) {
  using namespace nuclear;
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() == 1 && (args[0] == "-h" || args[0] == "--help")) {
    std::cout << kUsage;
    return 0;
  }

  Plan plan;
  try {
    plan = build_plan(args);
  } catch (const Error& e) {
    std::cerr << "nuclear: " << e.what() << "\n" << kUsage;
    return 1;
  }

  try {
    if (plan.command == Command::validate) return run_validation(plan, std::cout) ? 0 : 2;

    const CompareReport report = execute_plan(plan);
    for (const auto& row : report.rows) {
      if (!row.error.empty()) {
        std::cerr << "nuclear: x=" << row.x << " theta=" << row.theta.str() << ": " << row.error
                  << "\n";
      }
    }
    if (plan.out) {
      emit_report(report, plan.format, *plan.out);
    } else {
      std::cout << (plan.format == ReportFormat::csv ? format_csv(report) : format_json(report));
    }
  } catch (const Error& e) {
    std::cerr << "nuclear: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::usage ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "nuclear: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
