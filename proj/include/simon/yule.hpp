#pragma once

// Yule-Simon distribution f(x) = rho * B(x, rho + 1), x = 1, 2, ...
//
// Survival has the closed form P(X > x) = x * B(x, rho + 1) = x f(x) / rho,
// so cdf and survival are exact to the accuracy of the pmf at every x.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "simon/random.hpp"
#include "simon/snapshot.hpp"

namespace simon {

// rho = 1 / (1 - p0); requires p0 in (0, 1).
double rho_from_p0(double p0);
// p0 = 1 - 1 / rho; requires rho > 1.
double p0_from_rho(double rho);

double log_pmf(std::uint64_t x, double rho);
double pmf(std::uint64_t x, double rho);
// P(X <= x); cdf(0) = 0.
double cdf(std::uint64_t x, double rho);
// P(X > x); survival(0) = 1. Keeps full relative accuracy in the far tail.
double survival(std::uint64_t x, double rho);
double log_survival(std::uint64_t x, double rho);

// Inverse-transform sampler: a table of survival values up to x_cache
// (stopping early once the tail mass is negligible) with exact bisection on
// the closed-form survival beyond it.
class YuleSampler {
 public:
  static constexpr std::size_t kDefaultCache = 100000;

  explicit YuleSampler(double rho, std::size_t x_cache = kDefaultCache);
  std::uint64_t operator()(Rng& rng) const;
  double rho() const { return rho_; }

 private:
  std::uint64_t invert_tail(double v) const;

  double rho_;
  std::vector<double> survival_;  // survival_[x-1] = P(X > x)
};

std::vector<std::uint64_t> sample(double rho, std::size_t n, Rng& rng);

// Size x with a (possibly fractional) count.
struct WeightedCount {
  std::uint64_t x = 0;
  double weight = 0.0;
};
using WeightedCounts = std::vector<WeightedCount>;

WeightedCounts to_weighted(const SizeDistribution& dist);

struct YuleFit {
  double rho_hat = 0.0;
  double log_likelihood = 0.0;
  double n_observations = 0.0;
  double derived_p0 = 0.0;   // 1 - 1/rho_hat
  bool domain_flag = false;  // rho_hat > 1: inside the generative model's range
  int iterations = 0;
};

struct FitOptions {
  // Fit the distribution conditional on X >= min_size; counts below are ignored.
  std::uint64_t min_size = 1;
  int max_iterations = 200;
  double tolerance = 1e-8;  // on |Δ log rho|
};

// Σ n(x) log f(x; rho), or its truncated version when min_size > 1.
double log_likelihood(std::span<const WeightedCount> counts, double rho, std::uint64_t min_size = 1);

// Maximum-likelihood rho. Maximises over log rho: coarse scan of
// [1e-3, 1e3] (widened on boundary hits), then safeguarded Newton on the score.
// Throws DegenerateInputError when all mass sits at the smallest size or fewer
// than two observations remain, ConvergenceError (with the best point) on
// hitting the iteration cap.
YuleFit mle_rho(std::span<const WeightedCount> counts, const FitOptions& options = {});
YuleFit mle_rho(const SizeDistribution& dist, const FitOptions& options = {});

}  // namespace simon
