#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "nuclear/counts.hpp"
#include "nuclear/error.hpp"
#include "oracles.hpp"

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

u64 sieve_count(u64 x, ThetaRational t) {
  CountQuery q;
  q.x = x;
  q.theta = t;
  return count_powered(q).count;
}

const ThetaRational kThetas[] = {{1, 3}, {1, 2}, {2, 3}, {3, 4}, {2, 5}, {1, 7}, {5, 8}};

}  // namespace

TEST_CASE("rational exponent") {
  const ThetaRational t(2, 4);
  CHECK(t.num() == 1);
  CHECK(t.den() == 2);
  CHECK(t.str() == "1/2");
  CHECK(t.kappa() == 1.0);
  CHECK(ThetaRational::parse("6/9") == ThetaRational(2, 3));
  CHECK(kind_of([] { ThetaRational::parse("0/1"); }) == ErrorKind::usage);
  CHECK(kind_of([] { ThetaRational::parse("1/1"); }) == ErrorKind::usage);
  CHECK(kind_of([] { ThetaRational::parse("3/2"); }) == ErrorKind::usage);
  CHECK(kind_of([] { ThetaRational::parse("0.5"); }) == ErrorKind::usage);
  CHECK(kind_of([] { ThetaRational::parse("1/x"); }) == ErrorKind::usage);
  CHECK(kind_of([] { ThetaRational(1, 65); }) == ErrorKind::range);
  CHECK(parse_method("stratified") == CountMethod::stratified);
  CHECK(kind_of([] { parse_method("magic"); }) == ErrorKind::usage);
}

TEST_CASE("small exact counts") {
  CHECK(count_nuclear(10, 2).count == 4);
  CHECK(sieve_count(10, {1, 2}) == 4);
  CHECK(count_powered_stratified(10, {1, 2}).count == 4);
  CHECK(sieve_count(1, {1, 2}) == 1);
  CHECK(count_powered_stratified(1, {1, 3}).count == 1);
  for (u64 x : {1, 2, 17, 1000, 10000}) CHECK(count_nuclear(x, x).count == x);
  CHECK(kind_of([] { count_nuclear(10, 11); }) == ErrorKind::invalid_argument);
}

TEST_CASE("both methods match brute force") {
  auto rng = oracle::rng(10);
  for (int i = 0; i < 60; ++i) {
    const u64 x = 1 + rng() % 4000;
    const ThetaRational t = kThetas[rng() % std::size(kThetas)];
    const u64 want = oracle::powered_count(x, static_cast<unsigned>(t.num()),
                                           static_cast<unsigned>(t.den()));
    INFO("x=", x, " theta=", t.str());
    REQUIRE(sieve_count(x, t) == want);
    REQUIRE(count_powered_stratified(x, t).count == want);
  }
}

TEST_CASE("both methods agree past a segment boundary") {
  for (ThetaRational t : kThetas) {
    for (u64 x : {131071ULL, 131072ULL, 131073ULL, 400000ULL}) {
      INFO("x=", x, " theta=", t.str());
      CHECK(sieve_count(x, t) == count_powered_stratified(x, t).count);
    }
  }
}

TEST_CASE("thread count does not change the result") {
  CountQuery q;
  q.x = 1'000'000;
  CountOptions one, four;
  one.threads = 1;
  four.threads = 4;
  CHECK(count_powered(q, one).count == count_powered(q, four).count);
  CHECK(count_nuclear(1'000'000, 1000, one).count == count_nuclear(1'000'000, 1000, four).count);
}

TEST_CASE("nuclear counts match brute force") {
  auto rng = oracle::rng(11);
  for (int i = 0; i < 40; ++i) {
    const u64 x = 1 + rng() % 3000;
    const u64 y = 1 + rng() % x;
    REQUIRE(count_nuclear(x, y).count == oracle::nuclear_count(x, y));
  }
}

TEST_CASE("guarded predicate brackets the long double answer") {
  auto rng = oracle::rng(12);
  std::uniform_real_distribution<double> zdist(0.25, 4.0), Tdist(-2.0, 2.0), tdist(0.2, 0.8);
  for (int i = 0; i < 30; ++i) {
    CountQuery q;
    q.x = 1 + rng() % 3000;
    q.theta_float = tdist(rng);
    q.z = zdist(rng);
    q.Theta = (i % 3 == 0) ? 0.0 : Tdist(rng);
    const CountResult r = count_powered(q);
    u64 members = 0, close = 0;
    for (u64 n = 1; n <= q.x; ++n) {
      const auto m = oracle::powered_member(n, *q.theta_float, q.z, q.Theta);
      members += m.member;
      close += m.close;
    }
    INFO("x=", q.x, " theta=", *q.theta_float, " z=", q.z, " Theta=", q.Theta);
    CHECK(r.count - r.ambiguous <= members);
    CHECK(members <= r.count);
    CHECK(r.ambiguous <= close);
  }
}

TEST_CASE("guarded predicate at a rational exponent includes boundary cases") {
  // k(n) = n^(1/2) exactly when n = r^2, r squarefree; all are counted and
  // flagged.
  CountQuery q;
  q.x = 100000;
  q.theta_float = 0.5;
  const CountResult r = count_powered(q);
  CHECK(r.count == sieve_count(q.x, {1, 2}));
  u64 squares = 0;
  for (u64 s = 1; s * s <= q.x; ++s) squares += oracle::trial_factor(s).mobius != 0;
  CHECK(r.ambiguous >= squares);
}

TEST_CASE("n = 1 convention for log powers") {
  CountQuery q;
  q.x = 1;
  q.Theta = -1;
  CHECK(count_powered(q).count == 1);
  q.Theta = 1;
  CHECK(count_powered(q).count == 0);
  q.Theta = 0;
  q.z = 0.5;
  CHECK(count_powered(q).count == 0);
}

TEST_CASE("monotone in z") {
  CountQuery q;
  q.x = 50000;
  u64 prev = 0;
  for (double z : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    q.z = z;
    const u64 c = count_powered(q).count;
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("errors") {
  CountQuery q;
  q.x = 1000;
  q.z = 2;
  q.method = CountMethod::stratified;
  CHECK(kind_of([&] { count_powered(q); }) == ErrorKind::unsupported);
  CountOptions small;
  small.budget.max_sieve_x = 100;
  small.budget.max_stratified_x = 100;
  CountQuery big;
  big.x = 1000;
  CHECK(kind_of([&] { count_powered(big, small); }) == ErrorKind::resource_exhausted);
  CHECK(kind_of([&] { count_powered_stratified(1000, {1, 2}, small); }) ==
        ErrorKind::resource_exhausted);
  CHECK(kind_of([] { count_powered_stratified(1'000'000'000'000'000ULL, {63, 64}); }) ==
        ErrorKind::range);
  CountQuery bad;
  bad.z = 0;
  CHECK(kind_of([&] { count_powered(bad); }) == ErrorKind::invalid_argument);
  bad.z = 1;
  bad.x = 0;
  CHECK(kind_of([&] { count_powered(bad); }) == ErrorKind::invalid_argument);
}

TEST_CASE("decomposition") {
  CHECK(decompose(12) == Decomposition{3, 2});
  CHECK(decompose(1) == Decomposition{1, 1});
  CHECK(decompose(8) == Decomposition{1, 4});
  CHECK(decompose(30) == Decomposition{30, 1});
  CHECK(kind_of([] { decompose(0); }) == ErrorKind::invalid_argument);

  // Every admissible pair (l, m) reaches each n <= N exactly once.
  constexpr u64 N = 20000;
  std::vector<int> hits(N + 1, 0);
  for (u64 m = 1; m <= N; ++m) {
    const u64 km = oracle::radical(m);
    if (m * km > N) continue;
    for (u64 l = 1; l * m * km <= N; ++l) {
      if (std::gcd(l, km) != 1 || oracle::trial_factor(l).mobius == 0) continue;
      const u64 n = l * m * km;
      ++hits[n];
      REQUIRE(decompose(n) == Decomposition{l, m});
    }
  }
  for (u64 n = 1; n <= N; ++n) REQUIRE(hits[n] == 1);
}

TEST_CASE("constructive lower bound") {
  CHECK(lower_bound_W(51200, {1, 2}) == 3);
  CHECK(lower_bound_W(100, {1, 2}) == 0);

  // Independent enumeration in long double for the interval endpoints.
  auto brute = [](u64 x, ThetaRational t) {
    const u64 a = t.num(), b = t.den();
    const u64 l = b / a + 1;
    const long double X = static_cast<long double>(x) / std::pow(8.0L, l);
    const long double nt = std::pow(X, static_cast<long double>(l * a - b) / b);
    const long double mt = std::pow(X, static_cast<long double>(b - (l - 1) * a) / b);
    std::set<u64> ws;
    for (u64 n = 1; n <= nt; ++n) {
      if (2 * n <= nt || oracle::trial_factor(n).mobius == 0) continue;
      for (u64 m = 1; m <= mt; ++m) {
        if (2 * m <= mt || oracle::trial_factor(m).mobius == 0) continue;
        ws.insert(static_cast<u64>(std::pow(8.0L, l) * std::pow(static_cast<long double>(n), l - 1) *
                                   std::pow(static_cast<long double>(m), l)));
      }
    }
    for (u64 w : ws) {
      const u64 k = oracle::radical(w);
      REQUIRE(w <= x);
      REQUIRE(oracle::pow128(k, static_cast<unsigned>(b)) <= oracle::pow128(w, static_cast<unsigned>(a)));
    }
    return static_cast<u64>(ws.size());
  };
  auto rng = oracle::rng(13);
  for (int i = 0; i < 25; ++i) {
    const ThetaRational t = i % 2 ? ThetaRational{1, 2} : ThetaRational{2, 5};
    const u64 x = 1000 + rng() % 50'000'000;
    INFO("x=", x, " theta=", t.str());
    const u64 w = lower_bound_W(x, t);
    CHECK(w == brute(x, t));
    if (x <= 5'000'000) CHECK(w <= sieve_count(x, t));
  }
}

TEST_CASE("Erdos ratio") {
  CHECK(erdos_ratio(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(erdos_ratio(4) == doctest::Approx(15.0 / 28.0).epsilon(1e-15));
  CHECK(kind_of([] { erdos_ratio(1); }) == ErrorKind::invalid_argument);
  auto rng = oracle::rng(14);
  for (int i = 0; i < 10; ++i) {
    const u64 x = 2 + rng() % 3000;
    long double num = 0, den = 0;
    for (u64 m = 1; m <= x; ++m) {
      const u64 k = oracle::radical(m);
      num += static_cast<long double>(m / k);
      den += static_cast<long double>(x) / k;
    }
    CHECK(erdos_ratio(x) == doctest::Approx(static_cast<double>(num / den)).epsilon(1e-13));
  }
}
