#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "simon/errors.hpp"
#include "simon/rate_equation.hpp"
#include "simon/yule.hpp"

using namespace simon;

namespace {

std::vector<std::uint64_t> at(std::initializer_list<std::uint64_t> steps) { return steps; }

// Total variation between n(x, N) / (N p0) and the Yule-Simon law, counting
// the stationary mass above N that the iteration cannot have reached.
double tv_distance(double p0, std::uint64_t N) {
  MasterOptions opts;
  opts.x_trunc = N;
  const auto s = iterate_master(p0, N, std::vector<std::uint64_t>{N}, opts)[0];
  const auto star = steady_state(p0, N, N);
  double l1 = survival(N, rho_from_p0(p0)) * N * p0;
  for (std::uint64_t x = 1; x <= N; ++x) l1 += std::abs(s.count(x) - star[x - 1]);
  return 0.5 * l1 / (N * p0);
}

}  // namespace

TEST_CASE("argument checks") {
  const auto steps = at({1});
  CHECK_THROWS_AS(iterate_master(0.0, 10, steps), DomainError);
  CHECK_THROWS_AS(iterate_master(1.0, 10, steps), DomainError);
  CHECK_THROWS_AS(iterate_master(0.5, 0, steps), DomainError);
  CHECK_THROWS_AS(steady_state(1.5, 10, 5), DomainError);
  CHECK_THROWS_AS(steady_state(0.5, 0, 5), DomainError);
}

TEST_CASE("first steps by hand") {
  const auto steps = at({1, 2, 3});
  const auto s = iterate_master(0.5, 3, steps);
  REQUIRE(s.size() == 3);
  CHECK(s[0].N == 1);
  CHECK(s[0].count(1) == 1.0);
  CHECK(s[1].count(1) == doctest::Approx(1.0));
  CHECK(s[1].count(2) == doctest::Approx(0.5));
  // N = 2 -> 3: n1 += 0.5 - 0.5 * 1 / 2, n2 += 0.5 (1 - 2 * 0.5) / 2, n3 += 0.5 (2 * 0.5) / 2
  CHECK(s[2].count(1) == doctest::Approx(1.25));
  CHECK(s[2].count(2) == doctest::Approx(0.5));
  CHECK(s[2].count(3) == doctest::Approx(0.25));

  // general p0
  const double p0 = 0.2;
  const auto t = iterate_master(p0, 2, at({2}));
  CHECK(t[0].count(1) == doctest::Approx(2 * p0));
  CHECK(t[0].count(2) == doctest::Approx(1 - p0));
}

TEST_CASE("recording ignores out-of-range steps and sorts") {
  const auto steps = at({50, 0, 10, 99999});
  const auto s = iterate_master(0.5, 100, steps);
  REQUIRE(s.size() == 2);
  CHECK(s[0].N == 10);
  CHECK(s[1].N == 50);
}

TEST_CASE("mass is conserved and counts stay non-negative") {
  std::vector<std::uint64_t> steps;
  for (std::uint64_t n = 1; n <= 10000; n *= 3) steps.push_back(n);
  steps.push_back(10000);
  MasterOptions opts;
  opts.x_trunc = 50;  // force mass through the overflow bin
  for (double p0 : {0.05, 0.5}) {
    for (const auto& s : iterate_master(p0, 10000, steps, opts)) {
      CHECK(std::abs(s.total_mass() / static_cast<double>(s.N) - 1.0) < 1e-9);
      CHECK(std::all_of(s.n.begin(), s.n.end(), [](double v) { return v >= 0.0; }));
      CHECK(s.overflow_projects >= 0.0);
    }
  }
  const auto s = iterate_master(0.5, 10000, at({10000}));
  CHECK(std::abs(s[0].total_mass() / 1e4 - 1.0) < 1e-9);
  // expected project count is 1 + p0 (N - 1)
  CHECK(s[0].total_projects() == doctest::Approx(1.0 + 0.5 * 9999).epsilon(1e-12));
}

TEST_CASE("iteration approaches the Beta-function law") {
  const double p0 = 2.0 / 3.0;
  const auto s = iterate_master(p0, 1000000, at({1000000}));
  double worst = 0.0;
  for (std::uint64_t x = 1; x <= 30; ++x) {
    const double want = pmf(x, 3.0);
    worst = std::max(worst, std::abs(s[0].count(x) / (1e6 * p0) / want - 1.0));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("steady state values") {
  const auto star = steady_state(2.0 / 3.0, 30000, 100);
  CHECK(star[0] == doctest::Approx(1.5e4).epsilon(1e-14));
  for (double p0 : {0.16, 0.5, 2.0 / 3.0}) {
    const double rho = rho_from_p0(p0);
    const auto v = steady_state(p0, 1000, 100);
    double worst = 0.0;
    for (std::uint64_t x = 2; x <= 100; ++x) {
      const double want = static_cast<double>(x - 1) / (rho + static_cast<double>(x));
      worst = std::max(worst, std::abs(v[x - 1] / v[x - 2] / want - 1.0));
    }
    CHECK(worst < 1e-13);
    CHECK(v[9] == doctest::Approx(1000 * p0 * pmf(10, rho)).epsilon(1e-14));
  }
}

TEST_CASE("steady state sums to N p0") {
  for (double p0 : {0.5, 2.0 / 3.0, 0.8}) {
    const std::uint64_t N = 100000;
    const double rho = rho_from_p0(p0);
    const auto v = steady_state(p0, N, 200000);
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    // remainder beyond x_max from the closed-form survival
    const double rest = survival(200000, rho) * N * p0;
    CHECK(std::abs((sum + rest) / (N * p0) - 1.0) < 1e-6);
    CHECK(std::abs(sum / (N * p0) - 1.0) < 1e-6);
  }
}

TEST_CASE("each size class grows in proportion to N") {
  const auto s = iterate_master(0.5, 100001, at({100000, 100001}));
  for (std::uint64_t x = 1; x <= 20; ++x) {
    const double ratio = s[1].count(x) / s[0].count(x);
    CHECK(std::abs(ratio / (100001.0 / 100000.0) - 1.0) < 1e-3);
  }
}

TEST_CASE("convergence is slower for small p0") {
  const double fast = tv_distance(0.5, 10000);
  const double mid = tv_distance(0.2, 10000);
  const double slow = tv_distance(0.05, 10000);
  CHECK(fast < mid);
  CHECK(mid < slow);
  CHECK(fast < 1e-3);
  // and each shrinks with N
  CHECK(tv_distance(0.05, 20000) < slow);
}
