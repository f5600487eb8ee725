#pragma once

// Empirical estimators over membership data: aggregate exponential growth,
// relative entry rates, size-dependent project growth, the founding
// probability p0(t) = ΔN_p / ΔN_d, collaborative classification and the
// inter-arrival censoring correction.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "simon/snapshot.hpp"

namespace simon {

struct TimePoint {
  Month month = 0;
  double value = 0.0;
};

// Linear-interpolation quantile (the "type 7" definition), q in [0, 1].
double quantile(std::vector<double> values, double q);

struct GrowthFit {
  double omega = 0.0;      // slope of ln X per month
  double intercept = 0.0;  // ln X at month 0
  double std_error = 0.0;  // standard error of omega
  double r_squared = 0.0;
  double p_value = 1.0;    // two-sided t-test of omega = 0
  std::size_t n_points = 0;
};

// OLS of ln X on month over unmasked points. Throws DomainError naming the
// month of a nonpositive X, DegenerateInputError for fewer than 3 points.
GrowthFit fit_exponential_growth(std::span<const TimePoint> series, const MonthMask& mask = {});

struct EntryRateSeries {
  std::vector<TimePoint> g;  // g(t) = (N(t) - N(t-1)) / N(t)
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

// g(t) for every month t where t and t-1 are both present and unmasked and
// N(t) > 0. Quantiles are NaN for an empty series.
EntryRateSeries relative_entry_rate(std::span<const TimePoint> counts, const MonthMask& mask = {});

struct EntryRates {
  EntryRateSeries projects;
  EntryRateSeries developers;
};
EntryRates relative_entry_rates(std::span<const SnapshotSummary> summaries, const MonthMask& mask = {});

struct SizeBin {
  std::uint64_t min_size = 0;  // inclusive
  std::uint64_t max_size = 0;  // inclusive
  std::size_t n_projects = 0;
  double mean_size = 0.0;
  double mean_increment = 0.0;  // mean size change over the window
  double log_increment_se = 0.0;  // standard error of ln(mean_increment)
};

struct GammaOptions {
  int window_months = 12;
  std::size_t min_per_bin = 20;
};

struct GammaFit {
  Month window_start = 0;
  int window_months = 12;
  double gamma = 0.0;
  double intercept = 0.0;  // ln of the proportionality factor
  // Standard error of gamma. Weighted fit: from the bins' own standard
  // errors. Unweighted fit: from the residuals, infinite with two bins.
  double std_error = 0.0;
  bool weighted = false;
  std::vector<SizeBin> bins;  // bins with positive mean increment enter the fit
  std::size_t n_projects = 0;
};

struct SizeIncrement {
  std::uint64_t size = 0;  // size at window start, >= 1
  double increment = 0.0;  // size change over the window
};

// Bins observations by start size in base-2 bins, merging bins with fewer
// than min_per_bin projects into their neighbours (the sparse tail merges
// downward), and regresses ln(mean increment) on ln(mean size). The
// regression is weighted by the inverse squared standard error of each bin's
// ln(mean increment). When some bin has no spread (noiseless data) it falls
// back to ordinary least squares.
GammaFit fit_growth_exponent(std::span<const SizeIncrement> observations,
                             const GammaOptions& options = {});

// One fit per consecutive window [s, s + window) covering the log, for
// projects alive at s. Throws DegenerateInputError when the log spans fewer
// than window_months or no window yields a fit.
std::vector<GammaFit> size_dependent_growth(const EventLog& log, const GammaOptions& options = {});

enum class P0Variant { All, Collaborative };

struct MonthlyEntries {
  Month month = 0;
  double new_projects = 0.0;    // G1
  double new_developers = 0.0;  // Gtot
};

struct P0Point {
  Month month = 0;
  double g1 = 0.0;
  double gtot = 0.0;
  double p0 = 0.0;
  bool above_one = false;  // impossible under the model's assumptions
};

struct P0Series {
  P0Variant variant = P0Variant::All;
  std::vector<P0Point> points;
  double median = 0.0;
  std::size_t n_above_one = 0;
};

// Ratio series over unmasked months with ΔN_d > 0.
P0Series p0_series(std::span<const MonthlyEntries> entries, P0Variant variant,
                   const MonthMask& mask = {});

struct CensorOptions {
  double horizon_days = 450.0;
  double days_per_month = 365.25 / 12.0;
};

struct ProjectLabel {
  EntityId project = 0;
  Month founded = 0;
  std::optional<Month> second_developer;  // first month with >= 2 concurrent developers
  bool collaborative = false;
  // Non-collaborative but founded within the censor horizon of the
  // observation end (or after it): a second developer may still arrive.
  bool censored = false;
};

// Labels indexed by project id. Collaborative iff the project has two or more
// concurrently active developers in some month <= observation_end.
std::vector<ProjectLabel> classify_collaborative(const EventLog& log, Month observation_end,
                                                 const CensorOptions& options = {});

// Monthly founding counts for the p0 estimate. For the collaborative variant,
// only collaborative projects count as founded, and developers whose first
// month coincides with founding a non-collaborative project are excluded.
std::vector<MonthlyEntries> founding_entries(const EventLog& log, Month first, Month last,
                                             P0Variant variant,
                                             std::span<const ProjectLabel> labels = {});

struct WaitObservation {
  double days = 0.0;
  bool censored = false;
};

struct InterArrivalFit {
  double lambda = 0.0;  // per day
  double mean_days = 0.0;
  double prob_before_mean = 0.0;  // empirical fraction of waits < mean_days
  double censor_factor = 0.0;     // 1 / prob_before_mean
  std::size_t n_uncensored = 0;
  std::size_t n_censored = 0;
  // False when prob_before_mean is 0 or 1: the waits are not exponential-like.
  bool exponential_plausible = true;
};

// Exponential MLE on uncensored waits. Throws DegenerateInputError when fewer
// than min_cohort waits are uncensored.
InterArrivalFit interarrival_fit(std::span<const WaitObservation> waits, std::size_t min_cohort = 30);

// Waits from founding to the second developer for projects founded in
// [cohort_first, cohort_last]; projects still single at observation_end are
// censored at that point.
std::vector<WaitObservation> cohort_waits(std::span<const ProjectLabel> labels, Month cohort_first,
                                          Month cohort_last, Month observation_end,
                                          const CensorOptions& options = {});

InterArrivalFit interarrival_fit(const EventLog& log, Month cohort_first, Month cohort_last,
                                 Month observation_end, const CensorOptions& options = {});

}  // namespace simon
