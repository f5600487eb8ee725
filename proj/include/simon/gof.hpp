#pragma once

// Kolmogorov-Smirnov distance to a fitted Yule-Simon law and its
// semi-parametric bootstrap p-value (refit on every synthetic replica).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "simon/snapshot.hpp"
#include "simon/yule.hpp"

namespace simon {

// sup_x |ECDF(x) - F(x; rho)| with both step functions right-continuous at
// the integer atoms. Evaluated at every observed atom and the integer just
// below it, which covers every integer in [1, max observed size].
double ks_statistic(const SizeDistribution& dist, double rho);
// Same on real-valued counts (sizes strictly increasing).
double ks_statistic(std::span<const WeightedCount> counts, double rho);

struct GofOptions {
  std::size_t n_bootstrap = 1000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct GofResult {
  double rho_hat = 0.0;
  double ks_observed = 0.0;
  double p_value = 0.0;
  std::size_t n_bootstrap = 0;
  std::uint64_t seed = 0;
  std::size_t failed_replicas = 0;
  std::vector<double> replica_statistics;  // successful replicas, in replica order
  // Recorded conventions so results stay comparable across runs.
  static constexpr const char* kEcdfConvention = "integer-atoms;no-continuity-correction";
  static constexpr const char* kPValueConvention = "count(D_b >= D_obs)/n_valid;no-smoothing";
};

// Fraction of replica statistics >= observed.
double bootstrap_p_value(std::span<const double> replica_statistics, double observed);

// Fits rho on `dist`, then for each replica b draws total_projects values from
// Yule(rho_hat) on stream b of `seed`, refits, and records the KS distance to
// the refit. Throws DegenerateInputError if more than 1% of replica fits fail.
GofResult bootstrap_pvalue(const SizeDistribution& dist, const GofOptions& options = {});

}  // namespace simon
