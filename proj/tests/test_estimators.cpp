#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "simon/errors.hpp"
#include "simon/estimators.hpp"
#include "simon/random.hpp"
#include "simon/simulator.hpp"

using namespace simon;

namespace {

double normal(Rng& rng) {
  return std::sqrt(-2.0 * std::log(rng.uniform_open_low())) * std::cos(2.0 * M_PI * rng.uniform());
}

std::vector<TimePoint> exponential_series(double x0, double omega, int n, double noise = 0.0,
                                          std::uint64_t seed = 1) {
  Rng rng(seed);
  std::vector<TimePoint> out;
  for (int t = 0; t < n; ++t) {
    const double eps = noise > 0.0 ? noise * normal(rng) : 0.0;
    out.push_back({t, x0 * std::exp(omega * t + eps)});
  }
  return out;
}

// One project per (size, copy): `size` developers from month 0, and
// `gain(size)` more joining in month 6. Month 12 closes the window.
EventLog growth_fixture(const std::vector<std::uint64_t>& sizes, std::uint64_t copies,
                        std::uint64_t (*gain)(std::uint64_t)) {
  EventLogBuilder b;
  int dev = 0;
  for (auto x : sizes) {
    for (std::uint64_t c = 0; c < copies; ++c) {
      const std::string proj = "p" + std::to_string(x) + "_" + std::to_string(c);
      for (std::uint64_t i = 0; i < x; ++i) b.add("d" + std::to_string(dev++), proj, 0);
      for (std::uint64_t i = 0; i < gain(x); ++i) b.add("d" + std::to_string(dev++), proj, 6);
    }
  }
  b.add("late", "other", 12);
  return std::move(b).build();
}

EventLog parse(const std::string& text) {
  std::istringstream in(text);
  return parse_events(in);
}

}  // namespace

TEST_CASE("quantile") {
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0}, 0.1) == 2.0);
  CHECK(quantile({5.0}, 0.9) == 5.0);
  CHECK(std::isnan(quantile({}, 0.5)));
  CHECK_THROWS_AS(quantile({1.0}, 1.5), DomainError);
}

TEST_CASE("exponential growth: exact series") {
  const auto s = exponential_series(1000.0, 0.013, 89);
  const auto fit = fit_exponential_growth(s);
  CHECK(fit.omega == doctest::Approx(0.013).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(1000.0)).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.n_points == 89);
  CHECK(fit.p_value < 1e-12);
}

TEST_CASE("exponential growth: 2% multiplicative noise") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto fit = fit_exponential_growth(exponential_series(5000.0, 0.013, 89, 0.02, seed));
    CHECK(std::abs(fit.omega - 0.013) < 0.001);
    CHECK(fit.r_squared > 0.99);
    CHECK(fit.std_error > 0.0);
    CHECK(std::abs(fit.omega - 0.013) < 4 * fit.std_error);
  }
}

TEST_CASE("exponential growth: mask, bad values, too few points") {
  auto s = exponential_series(100.0, 0.02, 30);
  s[10].value = 1.0;  // a disrupted month
  s[11].value = -5.0;
  const MonthMask mask(std::set<Month>{10, 11});
  const auto fit = fit_exponential_growth(s, mask);
  CHECK(fit.n_points == 28);
  CHECK(fit.omega == doctest::Approx(0.02).epsilon(1e-12));
  try {
    fit_exponential_growth(s);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("month 11") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_exponential_growth(std::vector<TimePoint>{{0, 1.0}, {1, 2.0}}), DegenerateInputError);
  // flat series: zero slope, p = 1
  const auto flat = fit_exponential_growth(std::vector<TimePoint>{{0, 3.0}, {1, 3.0}, {2, 3.0}});
  CHECK(flat.omega == 0.0);
  CHECK(flat.p_value == 1.0);
}

TEST_CASE("relative entry rates") {
  const auto r = relative_entry_rate(std::vector<TimePoint>{{0, 100.0}, {1, 102.0}});
  REQUIRE(r.g.size() == 1);
  CHECK(r.g[0].month == 1);
  CHECK(r.g[0].value == doctest::Approx(2.0 / 102.0));
  CHECK(r.median == doctest::Approx(0.0196).epsilon(0.001));

  std::vector<TimePoint> constant;
  for (int t = 0; t < 10; ++t) constant.push_back({t, 42.0});
  const auto c = relative_entry_rate(constant);
  CHECK(c.g.size() == 9);
  for (const auto& p : c.g) CHECK(p.value == 0.0);

  const auto e = relative_entry_rate(exponential_series(500.0, 0.05, 40));
  for (const auto& p : e.g) CHECK(p.value == doctest::Approx(1.0 - std::exp(-0.05)).epsilon(1e-12));
  CHECK(e.q10 <= e.median);
  CHECK(e.median <= e.q90);
}

TEST_CASE("relative entry rates: gaps and zero counts") {
  std::vector<TimePoint> s{{0, 10.0}, {1, 11.0}, {2, 12.0}, {3, 0.0}, {4, 5.0}, {6, 7.0}, {7, 8.0}};
  const auto r = relative_entry_rate(s, MonthMask(std::set<Month>{1}));
  std::vector<Month> months;
  for (const auto& p : r.g) months.push_back(p.month);
  // 1 masked; 2 has no predecessor; 3 has N = 0; 5 missing; 6 has no predecessor
  CHECK(months == std::vector<Month>{4, 7});
  CHECK(std::isnan(relative_entry_rate(std::vector<TimePoint>{{0, 1.0}}).median));

  std::vector<SnapshotSummary> sums{{0, 10, 100, 0}, {1, 11, 102, 0}};
  const auto both = relative_entry_rates(sums);
  CHECK(both.projects.g[0].value == doctest::Approx(2.0 / 102.0));
  CHECK(both.developers.g[0].value == doctest::Approx(1.0 / 11.0));
}

TEST_CASE("growth exponent: noiseless fixtures give exact exponents") {
  const std::vector<std::uint64_t> sizes{1, 2, 4, 8, 16};
  SUBCASE("linear") {
    const auto fits = size_dependent_growth(growth_fixture(sizes, 20, [](std::uint64_t x) { return x; }));
    REQUIRE(fits.size() == 1);
    CHECK(fits[0].window_start == 0);
    CHECK(fits[0].gamma == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fits[0].intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(fits[0].bins.size() == 5);
    CHECK_FALSE(fits[0].weighted);
    CHECK(fits[0].n_projects == 100);
  }
  SUBCASE("quadratic") {
    const auto fits = size_dependent_growth(growth_fixture(sizes, 20, [](std::uint64_t x) { return x * x; }));
    CHECK(fits[0].gamma == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("scaling every increment moves the intercept only") {
    const auto a = size_dependent_growth(growth_fixture(sizes, 20, [](std::uint64_t x) { return x; }));
    const auto b = size_dependent_growth(growth_fixture(sizes, 20, [](std::uint64_t x) { return 3 * x; }));
    CHECK(b[0].gamma == doctest::Approx(a[0].gamma).epsilon(1e-12));
    CHECK(b[0].intercept - a[0].intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
}

TEST_CASE("growth exponent: binning") {
  std::vector<SizeIncrement> obs;
  for (std::uint64_t x = 1; x <= 64; ++x) {
    for (int c = 0; c < 30; ++c) obs.push_back({x, 2.0 * static_cast<double>(x)});
  }
  obs.push_back({1000, 2000.0});  // a lone giant merges into the last bin
  const auto fit = fit_growth_exponent(obs);
  REQUIRE(fit.bins.size() == 7);
  CHECK(fit.bins[0].min_size == 1);
  CHECK(fit.bins[0].max_size == 1);
  CHECK(fit.bins[3].min_size == 8);
  CHECK(fit.bins[3].max_size == 15);
  CHECK(fit.bins.back().max_size == 1000);
  for (const auto& b : fit.bins) CHECK(b.n_projects >= 20);
  CHECK(fit.gamma == doctest::Approx(1.0).epsilon(1e-12));

  // bins that shrink on average are left out of the log-log fit
  std::vector<SizeIncrement> mixed{};
  for (int c = 0; c < 20; ++c) {
    mixed.push_back({1, 1.0});
    mixed.push_back({2, 2.0});
    mixed.push_back({4, -1.0});
    mixed.push_back({8, 8.0});
  }
  const auto m = fit_growth_exponent(mixed);
  CHECK(m.bins.size() == 3);
  CHECK(m.gamma == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_growth_exponent(std::vector<SizeIncrement>{}), DegenerateInputError);
  CHECK_THROWS_AS(fit_growth_exponent(std::vector<SizeIncrement>(30, {3, 1.0})), DegenerateInputError);
}

TEST_CASE("growth exponent: weighted fit on noisy increments") {
  Rng rng(4);
  std::vector<SizeIncrement> obs;
  for (std::uint64_t x = 1; x <= 256; x *= 2) {
    for (int c = 0; c < 200; ++c) obs.push_back({x, static_cast<double>(x) * (1.0 + 0.3 * normal(rng))});
  }
  const auto fit = fit_growth_exponent(obs);
  CHECK(fit.weighted);
  CHECK(std::isfinite(fit.std_error));
  CHECK(std::abs(fit.gamma - 1.0) < 3 * fit.std_error);
  for (const auto& b : fit.bins) CHECK(b.log_increment_se > 0.0);
}

TEST_CASE("growth exponent: proportional growth in the simulator") {
  int within = 0, total = 0;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    SimParams p;
    p.p0 = 2.0 / 3.0;
    p.n_steps = 36 * 5000;
    p.seed = seed;
    p.record_history = true;
    for (const auto& f : size_dependent_growth(to_event_log(run(p), 5000))) {
      CHECK(f.weighted);
      ++total;
      within += std::abs(f.gamma - 1.0) < 2 * f.std_error;
    }
  }
  CHECK(total == 10);
  CHECK(within >= 9);
}

TEST_CASE("growth exponent: window errors") {
  EventLogBuilder b;
  b.add("a", "p", 0);
  b.add("b", "p", 5);
  const auto short_log = std::move(b).build();
  CHECK_THROWS_AS(size_dependent_growth(short_log), DegenerateInputError);
  GammaOptions bad;
  bad.window_months = 0;
  CHECK_THROWS_AS(size_dependent_growth(short_log, bad), DomainError);
}

TEST_CASE("p0 series") {
  std::vector<MonthlyEntries> e{{0, 61.0, 100.0}, {1, 120.0, 100.0}, {2, 5.0, 0.0}, {3, 30.0, 50.0}};
  const auto s = p0_series(e, P0Variant::All);
  REQUIRE(s.points.size() == 3);  // month 2 has no developers
  CHECK(s.points[0].p0 == doctest::Approx(0.61));
  CHECK_FALSE(s.points[0].above_one);
  CHECK(s.points[1].p0 == doctest::Approx(1.2));
  CHECK(s.points[1].above_one);
  CHECK(s.n_above_one == 1);
  CHECK(s.median == doctest::Approx(0.61));
  const auto masked = p0_series(e, P0Variant::All, MonthMask(std::set<Month>{1}));
  CHECK(masked.points.size() == 2);
  CHECK(masked.n_above_one == 0);
}

TEST_CASE("p0 series from a simulated corpus") {
  SimParams p;
  p.p0 = 2.0 / 3.0;
  p.n_steps = 60 * 2000;
  p.seed = 21;
  p.record_history = true;
  const auto log = to_event_log(run(p), 2000);
  const auto entries = founding_entries(log, log.first_month(), log.last_month(), P0Variant::All);
  CHECK(entries.size() == 60);
  const auto s = p0_series(entries, P0Variant::All);
  CHECK(std::abs(s.median - 2.0 / 3.0) < 0.03);
  CHECK(s.n_above_one == 0);
}

TEST_CASE("p0 above one when established developers found projects") {
  // month 1: one newcomer, but three new projects founded by old hands
  const auto log = parse(
      "a,p1,0,\n"
      "b,p2,0,\n"
      "a,p3,1,\n"
      "b,p4,1,\n"
      "c,p5,1,\n");
  const auto entries = founding_entries(log, 0, 1, P0Variant::All);
  CHECK(entries[1].new_projects == 3.0);
  CHECK(entries[1].new_developers == 1.0);
  const auto s = p0_series(entries, P0Variant::All);
  CHECK(s.points[1].above_one);
}

TEST_CASE("collaborative classification") {
  // solo: one developer forever; grows: second developer in month 3;
  // late: founded near the end; seq: two developers, never at the same time.
  const auto log = parse(
      "d1,solo,0,\n"
      "d2,grows,0,\n"
      "d3,grows,3,\n"
      "d4,late,20,\n"
      "d5,seq,0,4\n"
      "d6,seq,4,\n"
      "d7,gap,0,2\n"
      "d7,gap,5,\n"
      "d8,gap,2,6\n");
  const Month end = 23;  // "late" is 3 months, about 91 days, old at the end
  const auto labels = classify_collaborative(log, end);
  auto find = [&](const std::string& name) {
    for (const auto& l : labels) {
      if (log.project_name(l.project) == name) return l;
    }
    FAIL("missing project");
    return ProjectLabel{};
  };
  CHECK_FALSE(find("solo").collaborative);
  CHECK_FALSE(find("solo").censored);
  CHECK(find("grows").collaborative);
  CHECK(*find("grows").second_developer == 3);
  CHECK(find("grows").founded == 0);
  CHECK_FALSE(find("late").collaborative);
  CHECK(find("late").censored);
  CHECK_FALSE(find("seq").collaborative);
  CHECK(find("gap").collaborative);
  CHECK(*find("gap").second_developer == 5);

  // the second developer after the end does not count yet
  const auto early = classify_collaborative(log, 2);
  CHECK_FALSE(early[find("grows").project].collaborative);
  CHECK(early[find("grows").project].censored);

  // extending the end never flips collaborative to non-collaborative
  for (Month e1 = 0; e1 <= 30; ++e1) {
    const auto a = classify_collaborative(log, e1);
    const auto b = classify_collaborative(log, e1 + 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].collaborative) CHECK(b[i].collaborative);
    }
  }
}

TEST_CASE("collaborative founding entries") {
  // m0: a founds solo (non-collaborative); b founds team, c joins in m1.
  // m1: d arrives and founds nothing, joining team.
  const auto log = parse(
      "a,solo,0,\n"
      "b,team,0,\n"
      "c,team,1,\n"
      "d,team,1,\n");
  const auto labels = classify_collaborative(log, 1);
  const auto all = founding_entries(log, 0, 1, P0Variant::All);
  CHECK(all[0].new_projects == 2.0);
  CHECK(all[0].new_developers == 2.0);
  CHECK(all[1].new_projects == 0.0);
  CHECK(all[1].new_developers == 2.0);
  const auto col = founding_entries(log, 0, 1, P0Variant::Collaborative, labels);
  CHECK(col[0].new_projects == 1.0);
  CHECK(col[0].new_developers == 1.0);  // a is excluded
  CHECK(col[1].new_developers == 2.0);
  CHECK_THROWS_AS(founding_entries(log, 0, 1, P0Variant::Collaborative), DomainError);
  CHECK_THROWS_AS(founding_entries(log, 2, 1, P0Variant::All), DomainError);
}

TEST_CASE("inter-arrival fit on exponential waits") {
  Rng rng(6);
  std::vector<WaitObservation> waits;
  for (int i = 0; i < 3000; ++i) waits.push_back({rng.exponential(1.0 / 450.0), false});
  const auto fit = interarrival_fit(waits);
  CHECK(std::abs(fit.mean_days - 450.0) < 15.0);
  CHECK(fit.lambda == doctest::Approx(1.0 / fit.mean_days));
  CHECK(std::abs(fit.prob_before_mean - (1.0 - std::exp(-1.0))) < 0.02);
  CHECK(fit.censor_factor == doctest::Approx(1.0 / fit.prob_before_mean));
  CHECK(fit.censor_factor > 1.5);
  CHECK(fit.censor_factor < 1.7);
  CHECK(fit.exponential_plausible);
}

TEST_CASE("inter-arrival fit: degenerate and censored cohorts") {
  const auto equal = interarrival_fit(std::vector<WaitObservation>(40, {100.0, false}));
  CHECK(equal.prob_before_mean == 0.0);
  CHECK_FALSE(equal.exponential_plausible);
  CHECK(std::isinf(equal.censor_factor));

  std::vector<WaitObservation> half;
  for (int i = 0; i < 40; ++i) half.push_back({10.0 * (i + 1), false});
  for (int i = 0; i < 40; ++i) half.push_back({5000.0, true});
  const auto fit = interarrival_fit(half);
  CHECK(fit.n_uncensored == 40);
  CHECK(fit.n_censored == 40);
  CHECK(fit.mean_days == doctest::Approx(205.0));

  CHECK_THROWS_AS(interarrival_fit(std::vector<WaitObservation>(29, {5.0, false})), DegenerateInputError);
  CHECK_THROWS_AS(interarrival_fit(std::vector<WaitObservation>(40, {0.0, false})), DegenerateInputError);
}

TEST_CASE("inter-arrival waits from an event log") {
  // 40 projects founded in month 0, second developer after k months.
  EventLogBuilder b;
  for (int k = 0; k < 40; ++k) {
    const std::string p = "p" + std::to_string(k);
    b.add("f" + std::to_string(k), p, 0);
    b.add("s" + std::to_string(k), p, 1 + k % 10);
  }
  b.add("lonely", "q", 0);  // censored at the end
  b.add("young", "r", 40);  // outside the cohort
  const auto log = std::move(b).build();
  const CensorOptions opts;
  const auto labels = classify_collaborative(log, 40, opts);
  const auto waits = cohort_waits(labels, 0, 0, 40, opts);
  CHECK(waits.size() == 41);
  const auto fit = interarrival_fit(log, 0, 0, 40, opts);
  CHECK(fit.n_uncensored == 40);
  CHECK(fit.n_censored == 1);
  CHECK(fit.mean_days == doctest::Approx(5.5 * opts.days_per_month));
  CHECK(fit.prob_before_mean == doctest::Approx(0.5));
}
