#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nuclear/error.hpp"
#include "nuclear/plan.hpp"

using namespace nuclear;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::io;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("nuclear-plan-" + name + "-" + std::to_string(::getpid()));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NUCLEAR_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("plan defaults") {
  const Plan p = build_plan({"count", "--x", "1000000", "--theta", "1/2"});
  CHECK(p.command == Command::count);
  REQUIRE(p.grid.size() == 1);
  CHECK(p.grid[0].x_int == 1000000);
  CHECK(p.grid[0].theta.str() == "1/2");
  CHECK(p.method == CountMethod::sieve);
  CHECK(p.cfg.tol == 1e-9);
  CHECK(p.cfg.prime_limit == 1000000);
  CHECK(p.format == ReportFormat::csv);
  CHECK_FALSE(p.strict);
}

TEST_CASE("grid expansion") {
  const Plan p = build_plan({"compare", "--theta", "1/2", "--x-grid", "1e4:1e8:x10"});
  REQUIRE(p.grid.size() == 5);
  CHECK(p.grid[0].x == 1e4);
  CHECK(p.grid[4].x == 1e8);
  CHECK(p.grid[4].x_int == 100000000);
  CHECK(expand_grid("1:100:x3") == std::vector<double>{1, 3, 9, 27, 81});
  CHECK(expand_grid("5:5:x2") == std::vector<double>{5});
  // cartesian product of x, theta, z and Theta
  const Plan q = build_plan({"count", "--x", "100", "--x", "200", "--theta", "1/2", "--theta",
                             "1/3", "--z", "2", "--z", "4", "--Theta", "1"});
  CHECK(q.grid.size() == 8);
}

TEST_CASE("large integers keep every digit") {
  const Plan p = build_plan({"count", "--x", "999999999999999999", "--method", "stratified"});
  CHECK(p.grid[0].x_int == 999999999999999999ULL);
}

TEST_CASE("usage errors name the flag") {
  CHECK(kind_of([] { build_plan({"count", "--theta", "0/1", "--x", "10"}); }) == ErrorKind::usage);
  CHECK(message_of([] { build_plan({"count", "--theta", "0/1", "--x", "10"}); }).find("--theta") !=
        std::string::npos);
  CHECK(message_of([] { build_plan({"count", "--x", "0"}); }).find("--x") != std::string::npos);
  CHECK(message_of([] { build_plan({"count", "--x", "1e19"}); }).find("--x") != std::string::npos);
  CHECK(message_of([] { build_plan({"count", "--x-grid", "10:1:x2"}); }).find("--x-grid") !=
        std::string::npos);
  CHECK(message_of([] { build_plan({"count", "--x-grid", "1:10:x1"}); }).find("--x-grid") !=
        std::string::npos);
  CHECK(message_of([] { build_plan({"count", "--x", "10", "--method", "abacus"}); })
            .find("--method") != std::string::npos);
  CHECK(message_of([] { build_plan({"count", "--x", "10", "--format", "xml"}); }).find("--format") !=
        std::string::npos);
  CHECK(message_of([] { build_plan({"count", "--x", "10", "--prime-limit", "10"}); })
            .find("--prime-limit") != std::string::npos);
  CHECK(message_of([] { build_plan({"count", "--x", "10", "--bogus"}); }).find("--bogus") !=
        std::string::npos);
  CHECK(kind_of([] { build_plan({}); }) == ErrorKind::usage);
  CHECK(kind_of([] { build_plan({"frobnicate"}); }) == ErrorKind::usage);
  CHECK(kind_of([] { build_plan({"count"}); }) == ErrorKind::usage);
  CHECK_NOTHROW(build_plan({"validate"}));
}

TEST_CASE("cache directory from the environment") {
  ::setenv("NUCLEAR_CACHE_DIR", "/tmp/from-env", 1);
  CHECK(build_plan({"count", "--x", "10"}).cache_dir == std::filesystem::path("/tmp/from-env"));
  CHECK(build_plan({"count", "--x", "10", "--cache-dir", "/tmp/flag"}).cache_dir ==
        std::filesystem::path("/tmp/flag"));
  ::unsetenv("NUCLEAR_CACHE_DIR");
  CHECK_FALSE(build_plan({"count", "--x", "10"}).cache_dir.has_value());
}

TEST_CASE("count row") {
  const CompareReport r = execute_plan(build_plan({"count", "--x", "10", "--theta", "1/2"}));
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].exact == 4u);
  CHECK(r.rows[0].ambiguous == 0u);
  CHECK_FALSE(r.rows[0].s7.has_value());
}

TEST_CASE("compare rows") {
  const CompareReport r =
      execute_plan(build_plan({"compare", "--theta", "1/2", "--x", "1e6", "--x", "1e4"}));
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].x == 1e4);
  for (const auto& row : r.rows) {
    REQUIRE(row.ratio_s7.has_value());
    CHECK(std::isfinite(*row.ratio_s7));
    CHECK(*row.ratio_s7 > 0);
    CHECK(*row.ratio_s7 == static_cast<double>(*row.exact) / *row.s7);
    CHECK(row.error.empty());
  }
}

TEST_CASE("estimate-only row") {
  const CompareReport r = execute_plan(build_plan({"estimate", "--theta", "1/2", "--x", "1e14"}));
  REQUIRE(r.rows.size() == 1);
  CHECK_FALSE(r.rows[0].exact.has_value());
  CHECK(r.rows[0].s7.has_value());
  CHECK(r.rows[0].s8.has_value());
  // compare beyond the exact budget behaves the same way
  Plan p = build_plan({"compare", "--theta", "1/2", "--x", "1e12"});
  const CompareReport c = execute_plan(p);
  CHECK_FALSE(c.rows[0].exact.has_value());
  CHECK(c.rows[0].s7.has_value());
  CHECK(c.rows[0].error.empty());
}

TEST_CASE("saddle rows") {
  const CompareReport r = execute_plan(build_plan({"saddle", "--theta", "1/2", "--x", "1e8"}));
  REQUIRE(r.rows.size() == 1);
  CHECK(*r.rows[0].sigma_v == doctest::Approx(solve_saddle(0.5 * std::log(1e8)).sigma));
  CHECK(r.rows[0].F_v.has_value());
}

TEST_CASE("fail-soft and strict") {
  Plan p = build_plan({"count", "--theta", "1/2", "--x", "1000", "--x", "5000"});
  p.budget.max_sieve_x = 2000;
  const CompareReport r = execute_plan(p);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].exact.has_value());
  CHECK(r.rows[0].error.empty());
  CHECK_FALSE(r.rows[1].exact.has_value());
  CHECK_FALSE(r.rows[1].error.empty());
  p.strict = true;
  CHECK(kind_of([&] { execute_plan(p); }) == ErrorKind::resource_exhausted);
}

TEST_CASE("determinism") {
  const Plan p = build_plan({"compare", "--theta", "1/2", "--theta", "1/3", "--x-grid",
                             "1e3:1e5:x10", "--no-timing", "--threads", "3"});
  const std::string a = format_csv(execute_plan(p));
  const std::string b = format_csv(execute_plan(p));
  CHECK(a == b);
  CHECK(a.find(",0,0\n") != std::string::npos);
}

TEST_CASE("command line exit codes and output files") {
  const auto dir = scratch("cli");
  std::filesystem::create_directories(dir);
  const auto out1 = dir / "a.csv", out2 = dir / "b.csv", json = dir / "c.json";
  CHECK(run_cli("count --x 10 --theta 1/2 --out " + out1.string()) == 0);
  CHECK(slurp(out1).find("\n10,1/2,1,0,4,") != std::string::npos);
  CHECK(run_cli("count --theta 0/1 --x 10") == 1);
  CHECK(run_cli("count --x 10 --nope") == 1);
  CHECK(run_cli("count --x 10 --z 2 --method stratified") == 0);
  CHECK(run_cli("count --x 10 --z 2 --method stratified --strict") == 2);
  CHECK(run_cli("validate") == 0);

  const std::string args = "compare --theta 1/2 --x-grid 1e3:1e5:x10 --no-timing --cache-dir " +
                           (dir / "cache").string();
  CHECK(run_cli(args + " --out " + out1.string()) == 0);
  CHECK(run_cli(args + " --out " + out2.string()) == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(std::filesystem::exists(dir / "cache" / "primes.bin"));
  CHECK(run_cli(args + " --format json --out " + json.string()) == 0);
  const auto from_json = read_report(json, ReportFormat::json);
  CHECK(format_csv(from_json) == slurp(out1));
  std::filesystem::remove_all(dir);
}
