#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "simon/errors.hpp"
#include "simon/simulator.hpp"
#include "simon/yule.hpp"

using namespace simon;

namespace {

SimParams params(double p0, std::uint64_t n, std::uint64_t seed = 1) {
  SimParams p;
  p.p0 = p0;
  p.n_steps = n;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("validation") {
  CHECK_THROWS_AS(params(0.0, 10).validate(), DomainError);
  CHECK_THROWS_AS(params(1.0, 10).validate(), DomainError);
  CHECK_THROWS_AS(params(0.5, 0).validate(), DomainError);
  auto p = params(0.5, 10);
  p.checkpoints = {11};
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.checkpoints = {5, 3};
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_THROWS_AS(replicate(params(0.5, 10), 0), DomainError);
}

TEST_CASE("a single step is one project of size 1") {
  auto t = run(params(0.5, 1));
  REQUIRE(t.checkpoints.size() == 1);
  CHECK(t.final_checkpoint().step == 1);
  CHECK(t.final_checkpoint().n_projects == 1);
  CHECK(t.final_checkpoint().distribution.counts() == std::map<std::uint64_t, std::uint64_t>{{1, 1}});
}

TEST_CASE("founding-dominated limit") {
  auto t = run(params(0.999999, 1000, 3));
  CHECK(t.final_checkpoint().n_projects >= 999);
}

TEST_CASE("identical seeds give identical traces") {
  auto p = params(0.5, 20000, 99);
  p.checkpoints = {10, 100, 1000};
  auto a = run(p);
  auto b = run(p);
  REQUIRE(a.checkpoints.size() == 4);
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    CHECK(a.checkpoints[i].step == b.checkpoints[i].step);
    CHECK(a.checkpoints[i].distribution == b.checkpoints[i].distribution);
  }
  CHECK(a.generator_id == std::string(Rng::kGeneratorId));
  auto c = run(params(0.5, 20000, 100));
  CHECK_FALSE(c.final_checkpoint().distribution == a.final_checkpoint().distribution);
}

TEST_CASE("conservation, bounds and monotone sizes after every step") {
  for (double alpha : {1.0, 0.5, 1.5}) {
    auto p = params(0.4, 3000, 17);
    p.alpha = alpha;
    Rng rng(p.seed);
    auto s = SimState::founded(alpha);
    std::vector<std::uint64_t> prev = s.project_sizes();
    while (s.step() < p.n_steps) {
      step(s, p, rng);
      const auto& sizes = s.project_sizes();
      const auto sum = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
      REQUIRE(sum == s.step());
      REQUIRE(*std::max_element(sizes.begin(), sizes.end()) <= s.step());
      for (std::size_t i = 0; i < prev.size(); ++i) REQUIRE(sizes[i] >= prev[i]);
      prev = sizes;
    }
    double w = 0.0;
    for (auto x : prev) w += std::pow(static_cast<double>(x), alpha);
    CHECK(s.sum_alpha_weights() == doctest::Approx(w).epsilon(1e-10));
    CHECK(s.distribution() == SizeDistribution::from_values(prev));
  }
}

TEST_CASE("frozen-state selection tally matches the size-proportional weights") {
  auto p = params(0.5, 100000, 5);
  Rng rng(p.seed);
  auto s = SimState::founded(1.0);
  while (s.step() < p.n_steps) step(s, p, rng);

  // Join-branch probability of class x is x n(x) / N.
  const auto dist = s.distribution();
  std::map<std::uint64_t, std::uint64_t> tally;
  Rng draw(2024);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) ++tally[s.project_sizes()[s.select_project(draw)]];
  double worst = 0.0;
  int classes = 0;
  for (const auto& [x, n] : dist.counts()) {
    const double expected = static_cast<double>(x * n) / static_cast<double>(s.step()) * draws;
    if (expected < 20000) continue;
    worst = std::max(worst, std::abs(tally[x] - expected) / expected);
    ++classes;
  }
  CHECK(classes >= 3);
  CHECK(worst < 0.02);
}

TEST_CASE("weighted selection for alpha != 1") {
  auto p = params(0.5, 20000, 8);
  p.alpha = 1.5;
  Rng rng(p.seed);
  auto s = SimState::founded(p.alpha);
  while (s.step() < p.n_steps) step(s, p, rng);
  const auto& sizes = s.project_sizes();
  std::map<std::uint64_t, double> weight_by_class;
  double total = 0.0;
  for (auto x : sizes) {
    weight_by_class[x] += std::pow(static_cast<double>(x), 1.5);
    total += std::pow(static_cast<double>(x), 1.5);
  }
  std::map<std::uint64_t, std::uint64_t> tally;
  Rng draw(4);
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) ++tally[sizes[s.select_project(draw)]];
  double worst = 0.0;
  for (const auto& [x, w] : weight_by_class) {
    const double expected = w / total * draws;
    if (expected < 20000) continue;
    worst = std::max(worst, std::abs(tally[x] - expected) / expected);
  }
  CHECK(worst < 0.02);
}

TEST_CASE("prefix-sum tree search agrees with a linear scan") {
  WeightTree t;
  std::vector<double> w;
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const double v = 0.5 + rng.uniform() * 3;
    t.push_back(v);
    w.push_back(v);
    if (i % 7 == 0) {
      const std::size_t j = rng.below(w.size());
      t.add(j, 1.25);
      w[j] += 1.25;
    }
  }
  CHECK(t.total() == doctest::Approx(std::accumulate(w.begin(), w.end(), 0.0)));
  for (int k = 0; k < 2000; ++k) {
    const double target = rng.uniform() * t.total();
    double acc = 0.0;
    std::size_t want = 0;
    while (want < w.size() - 1 && acc + w[want] <= target) acc += w[want++];
    CHECK(t.find(target) == want);
  }
}

TEST_CASE("project count is about N p0") {
  for (double p0 : {0.16, 0.5, 2.0 / 3.0}) {
    auto t = run(params(p0, 100000, 11));
    const double ratio = static_cast<double>(t.final_checkpoint().n_projects) / (1e5 * p0);
    CHECK(ratio >= 0.98);
    CHECK(ratio <= 1.02);
  }
}

TEST_CASE("mean project count over replicas is 1 + p0 (N - 1)") {
  const double p0 = 0.3;
  const std::uint64_t n = 1000;
  auto r = replicate(params(p0, n, 21), 400);
  const double mean = r.averaged.back().mean_projects;
  const double expect = 1.0 + p0 * (n - 1);
  const double se = std::sqrt((n - 1) * p0 * (1 - p0) / 400.0);
  CHECK(std::abs(mean - expect) < 4 * se);
}

TEST_CASE("singleton density near the stationary value") {
  auto t = run(params(0.5, 100000, 13));
  const double rho = rho_from_p0(0.5);
  const double want = 0.5 * rho / (rho + 1.0);
  CHECK(want == doctest::Approx(1.0 / 3.0));
  const double got = static_cast<double>(t.final_checkpoint().distribution.count(1)) / 1e5;
  CHECK(std::abs(got - want) / want < 0.05);
}

TEST_CASE("replicate: R=1 equals run, determinism, jobs do not matter") {
  auto p = params(2.0 / 3.0, 5000, 7);
  auto single = run(p);
  auto r1 = replicate(p, 1);
  CHECK(r1.replicas[0].final_checkpoint().distribution == single.final_checkpoint().distribution);
  for (const auto& [x, n] : single.final_checkpoint().distribution.counts()) {
    CHECK(r1.averaged.back().mean_counts.at(x) == static_cast<double>(n));
  }
  auto a = replicate(p, 6, 1);
  auto b = replicate(p, 6, 3);
  REQUIRE(a.averaged.size() == b.averaged.size());
  CHECK(a.averaged.back().mean_counts == b.averaged.back().mean_counts);
  CHECK(a.averaged.back().mean_projects == b.averaged.back().mean_projects);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.replicas[i].final_checkpoint().distribution == b.replicas[i].final_checkpoint().distribution);
    CHECK(a.replicas[i].final_checkpoint().distribution == run_stream(p, i).final_checkpoint().distribution);
  }
}

TEST_CASE("averaged replicas approach the Yule-Simon law") {
  auto r = replicate(params(2.0 / 3.0, 200000, 7), 20);
  double tv = 0.0;
  for (std::uint64_t x = 1; x <= 50; ++x) tv += std::abs(r.averaged.back().frequency(x) - pmf(x, 3.0));
  CHECK(0.5 * tv < 0.01);
}

TEST_CASE("event-log export reproduces the internal tally") {
  auto p = params(2.0 / 3.0, 10000, 31);
  p.record_history = true;
  auto t = run(p);
  auto log = to_event_log(t, 250);
  CHECK(log.first_month() == 0);
  CHECK(log.last_month() == 39);
  auto snap = snapshot_at(log, log.last_month());
  CHECK(project_size_distribution(snap) == t.final_checkpoint().distribution);
  auto half = snapshot_at(log, 19);  // first 5000 arrivals
  auto p_half = p;
  p_half.n_steps = 5000;
  CHECK(project_size_distribution(half) == run(p_half).final_checkpoint().distribution);
  CHECK_THROWS_AS(to_event_log(run(params(0.5, 10)), 1), DomainError);
}
