#pragma once

// EM correction of the singleton count. Observed single-developer projects mix
// collaborative projects (described by the Yule-Simon law) with
// non-collaborative ones that never grow. The collaborative singleton count is
// latent: the E-step predicts it from the x >= 2 block under the current rho,
// the M-step refits rho on the corrected histogram.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "simon/snapshot.hpp"
#include "simon/yule.hpp"

namespace simon {

enum class EmStart {
  FullDataFit,   // rho fitted on the uncorrected histogram
  TruncatedFit,  // rho fitted on x >= 2 conditional on X >= 2 (the EM fixed point)
};

struct EMConfig {
  double epsilon = 1e-4;  // halt when |Δrho| < epsilon
  int max_iterations = 500;
  EmStart start = EmStart::FullDataFit;
  std::optional<double> rho_init;  // overrides `start`

  void validate() const;
};

struct EMResult {
  double rho_col = 0.0;
  double latent_singletons = 0.0;    // predicted collaborative n^c(1)
  double observed_singletons = 0.0;  // n(1) in the input
  double multi_developer_projects = 0.0;  // Σ_{x>=2} n(x)
  int iterations = 0;
  bool converged = false;
  std::vector<double> rho_trace;  // rho_init followed by every M-step result
  WeightedCounts corrected;       // {n^c(1)} ∪ {n(x) : x >= 2}

  double non_collaborative_singletons() const { return observed_singletons - latent_singletons; }
  double collaborative_projects() const { return latent_singletons + multi_developer_projects; }
};

// Throws DegenerateInputError unless the input has mass at two or more
// distinct sizes >= 2. Hitting the iteration cap yields converged = false.
EMResult em_fit(std::span<const WeightedCount> counts, const EMConfig& config = {});
EMResult em_fit(const SizeDistribution& dist, const EMConfig& config = {});

struct MonthlyEM {
  Month month = 0;
  EMResult result;
};

struct MonthlyCount {
  Month month = 0;
  double count = 0.0;
};

struct CollaborativeEntry {
  Month month = 0;
  // Increase of the corrected collaborative project population over the
  // previous month: new collaborative projects implied by the EM correction.
  double predicted_new_collaborative = 0.0;
  double new_developers = 0.0;
  double implied_p0 = 0.0;  // predicted / new developers (NaN when no developers)
};

// Both series must cover the same months (after removing masked ones);
// throws DomainError otherwise. A month appears in the output only when it
// and the preceding month are present and unmasked.
std::vector<CollaborativeEntry> predicted_collaborative_entries(
    std::span<const MonthlyEM> em_series, std::span<const MonthlyCount> new_developers,
    const MonthMask& mask = {});

}  // namespace simon
