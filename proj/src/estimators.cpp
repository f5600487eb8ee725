#include "simon/estimators.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "simon/errors.hpp"

namespace simon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct OlsResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r_squared = 0.0;
  std::size_t n = 0;
};

OlsResult ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateInputError("regressor has no spread");
  OlsResult r;
  r.n = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    ss_res += e * e;
  }
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  r.slope_se = n > 2 ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx)
                     : std::numeric_limits<double>::infinity();
  return r;
}

// Weighted least squares with known variances var[i] of y[i]; the slope
// standard error comes from those variances, not from the residuals.
OlsResult wls(std::span<const double> x, std::span<const double> y, std::span<const double> var) {
  const std::size_t n = x.size();
  double sw = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += 1.0 / var[i];
    mx += x[i] / var[i];
    my += y[i] / var[i];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx) / var[i];
    sxy += (x[i] - mx) * (y[i] - my) / var[i];
    syy += (y[i] - my) * (y[i] - my) / var[i];
  }
  if (sxx == 0.0) throw DegenerateInputError("regressor has no spread");
  OlsResult r;
  r.n = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    ss_res += e * e / var[i];
  }
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  r.slope_se = std::sqrt(1.0 / sxx);
  return r;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

GrowthFit fit_exponential_growth(std::span<const TimePoint> series, const MonthMask& mask) {
  std::vector<double> t, y;
  for (const auto& p : series) {
    if (mask.is_masked(p.month)) continue;
    if (!(p.value > 0.0)) {
      throw DomainError("nonpositive value at month " + std::to_string(p.month));
    }
    t.push_back(static_cast<double>(p.month));
    y.push_back(std::log(p.value));
  }
  if (t.size() < 3) throw DegenerateInputError("exponential growth fit needs at least 3 points");
  const auto r = ols(t, y);
  GrowthFit fit;
  fit.omega = r.slope;
  fit.intercept = r.intercept;
  fit.std_error = r.slope_se;
  fit.r_squared = r.r_squared;
  fit.n_points = r.n;
  if (r.slope_se == 0.0) {
    fit.p_value = r.slope == 0.0 ? 1.0 : 0.0;
  } else {
    boost::math::students_t dist(static_cast<double>(r.n - 2));
    fit.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.slope / r.slope_se)));
  }
  return fit;
}

EntryRateSeries relative_entry_rate(std::span<const TimePoint> counts, const MonthMask& mask) {
  std::map<Month, double> by_month;
  for (const auto& p : counts) {
    if (!mask.is_masked(p.month)) by_month[p.month] = p.value;
  }
  EntryRateSeries out;
  std::vector<double> values;
  for (const auto& [month, n] : by_month) {
    auto prev = by_month.find(month - 1);
    if (prev == by_month.end() || n == 0.0) continue;
    const double g = (n - prev->second) / n;
    out.g.push_back({month, g});
    values.push_back(g);
  }
  out.q10 = quantile(values, 0.1);
  out.median = quantile(values, 0.5);
  out.q90 = quantile(values, 0.9);
  return out;
}

EntryRates relative_entry_rates(std::span<const SnapshotSummary> summaries, const MonthMask& mask) {
  std::vector<TimePoint> projects, developers;
  for (const auto& s : summaries) {
    projects.push_back({s.month, static_cast<double>(s.n_projects)});
    developers.push_back({s.month, static_cast<double>(s.n_developers)});
  }
  return {relative_entry_rate(projects, mask), relative_entry_rate(developers, mask)};
}

GammaFit fit_growth_exponent(std::span<const SizeIncrement> observations, const GammaOptions& options) {
  if (observations.empty()) throw DegenerateInputError("no projects in the growth window");
  // Base-2 bins: bin k holds sizes [2^k, 2^(k+1)).
  std::map<int, std::vector<const SizeIncrement*>> raw;
  for (const auto& o : observations) {
    if (o.size < 1) throw DomainError("start size must be at least 1");
    raw[static_cast<int>(std::bit_width(o.size)) - 1].push_back(&o);
  }
  std::vector<std::vector<const SizeIncrement*>> merged;
  std::vector<const SizeIncrement*> pending;
  for (auto& [k, members] : raw) {
    pending.insert(pending.end(), members.begin(), members.end());
    if (pending.size() >= options.min_per_bin) {
      merged.push_back(std::move(pending));
      pending.clear();
    }
  }
  if (!pending.empty()) {
    if (merged.empty()) {
      merged.push_back(std::move(pending));
    } else {
      merged.back().insert(merged.back().end(), pending.begin(), pending.end());
    }
  }

  GammaFit fit;
  fit.window_months = options.window_months;
  fit.n_projects = observations.size();
  std::vector<double> lx, ly, lvar;
  for (const auto& members : merged) {
    SizeBin bin;
    bin.n_projects = members.size();
    bin.min_size = std::numeric_limits<std::uint64_t>::max();
    double sum_size = 0.0, sum_inc = 0.0;
    for (const auto* m : members) {
      bin.min_size = std::min(bin.min_size, m->size);
      bin.max_size = std::max(bin.max_size, m->size);
      sum_size += static_cast<double>(m->size);
      sum_inc += m->increment;
    }
    const double n = static_cast<double>(members.size());
    bin.mean_size = sum_size / n;
    bin.mean_increment = sum_inc / n;
    double ss = 0.0;
    for (const auto* m : members) {
      const double d = m->increment - bin.mean_increment;
      ss += d * d;
    }
    // delta method: sd(ln mean) = sd / (sqrt(n) mean)
    if (members.size() > 1 && bin.mean_increment > 0.0) {
      bin.log_increment_se = std::sqrt(ss / (n - 1.0) / n) / bin.mean_increment;
    }
    if (bin.mean_increment > 0.0) {
      lx.push_back(std::log(bin.mean_size));
      ly.push_back(std::log(bin.mean_increment));
      lvar.push_back(bin.log_increment_se * bin.log_increment_se);
      fit.bins.push_back(bin);
    }
  }
  if (lx.size() < 2) {
    throw DegenerateInputError("fewer than two size bins with positive growth");
  }
  fit.weighted = std::all_of(lvar.begin(), lvar.end(), [](double v) { return v > 0.0; });
  const auto r = fit.weighted ? wls(lx, ly, lvar) : ols(lx, ly);
  fit.gamma = r.slope;
  fit.intercept = r.intercept;
  fit.std_error = r.slope_se;
  return fit;
}

namespace {

// Number of distinct active developers per project at `month`.
std::vector<std::uint64_t> project_sizes_at(const EventLog& log, Month month) {
  std::vector<std::uint64_t> sizes(log.n_projects(), 0);
  const auto snap = snapshot_at(log, month);
  for (const auto& l : snap.links) ++sizes[l.project];
  return sizes;
}

}  // namespace

std::vector<GammaFit> size_dependent_growth(const EventLog& log, const GammaOptions& options) {
  if (options.window_months < 1) throw DomainError("window must be at least one month");
  if (log.empty() || log.last_month() - log.first_month() < options.window_months) {
    throw DegenerateInputError("log spans fewer months than the growth window");
  }
  std::vector<GammaFit> fits;
  for (Month start = log.first_month(); start + options.window_months <= log.last_month();
       start += options.window_months) {
    const auto before = project_sizes_at(log, start);
    const auto after = project_sizes_at(log, start + options.window_months);
    std::vector<SizeIncrement> obs;
    for (std::size_t p = 0; p < before.size(); ++p) {
      if (before[p] == 0) continue;
      obs.push_back({before[p], static_cast<double>(after[p]) - static_cast<double>(before[p])});
    }
    try {
      auto fit = fit_growth_exponent(obs, options);
      fit.window_start = start;
      fits.push_back(std::move(fit));
    } catch (const DegenerateInputError&) {
      // window without usable growth; skipped
    }
  }
  if (fits.empty()) throw DegenerateInputError("no growth window produced a fit");
  return fits;
}

P0Series p0_series(std::span<const MonthlyEntries> entries, P0Variant variant, const MonthMask& mask) {
  P0Series out;
  out.variant = variant;
  std::vector<double> values;
  for (const auto& e : entries) {
    if (mask.is_masked(e.month) || !(e.new_developers > 0.0)) continue;
    P0Point p;
    p.month = e.month;
    p.g1 = e.new_projects;
    p.gtot = e.new_developers;
    p.p0 = e.new_projects / e.new_developers;
    p.above_one = p.p0 > 1.0;
    if (p.above_one) ++out.n_above_one;
    values.push_back(p.p0);
    out.points.push_back(p);
  }
  out.median = quantile(values, 0.5);
  return out;
}

std::vector<ProjectLabel> classify_collaborative(const EventLog& log, Month observation_end,
                                                 const CensorOptions& options) {
  // Per project: (month, +1/-1) changes in the number of active developers,
  // with each developer's intervals on the project merged first.
  std::vector<std::map<EntityId, std::vector<std::pair<Month, std::optional<Month>>>>> per_project(
      log.n_projects());
  for (const auto& e : log.events()) per_project[e.project][e.developer].emplace_back(e.entry, e.exit);

  std::vector<ProjectLabel> labels(log.n_projects());
  for (std::size_t p = 0; p < per_project.size(); ++p) {
    auto& label = labels[p];
    label.project = static_cast<EntityId>(p);
    std::map<Month, int> delta;
    Month founded = std::numeric_limits<Month>::max();
    for (auto& [dev, intervals] : per_project[p]) {
      std::sort(intervals.begin(), intervals.end());
      std::optional<Month> cur_start;
      std::optional<Month> cur_end;
      bool open = false;
      auto flush = [&] {
        if (!open) return;
        ++delta[*cur_start];
        if (cur_end) --delta[*cur_end];
        open = false;
      };
      for (const auto& [a, b] : intervals) {
        founded = std::min(founded, a);
        if (open && (!cur_end || a <= *cur_end)) {
          if (cur_end && (!b || *b > *cur_end)) cur_end = b;
          continue;
        }
        flush();
        cur_start = a;
        cur_end = b;
        open = true;
      }
      flush();
    }
    label.founded = founded;
    int active = 0;
    for (const auto& [month, d] : delta) {
      active += d;
      if (active >= 2) {
        label.second_developer = month;
        break;
      }
    }
    label.collaborative = label.second_developer && *label.second_developer <= observation_end;
    if (!label.collaborative) {
      const double age_days = static_cast<double>(observation_end - founded) * options.days_per_month;
      label.censored = age_days < options.horizon_days;
    }
  }
  return labels;
}

std::vector<MonthlyEntries> founding_entries(const EventLog& log, Month first, Month last,
                                             P0Variant variant, std::span<const ProjectLabel> labels) {
  if (last < first) throw DomainError("founding_entries requires a nonempty month range");
  if (variant == P0Variant::Collaborative && labels.size() != log.n_projects()) {
    throw DomainError("collaborative variant needs one label per project");
  }
  const Month none = std::numeric_limits<Month>::max();
  std::vector<Month> dev_first(log.n_developers(), none), proj_first(log.n_projects(), none);
  for (const auto& e : log.events()) {
    dev_first[e.developer] = std::min(dev_first[e.developer], e.entry);
    proj_first[e.project] = std::min(proj_first[e.project], e.entry);
  }

  std::vector<bool> excluded_dev(log.n_developers(), false);
  if (variant == P0Variant::Collaborative) {
    // Developers who arrived to found a non-collaborative project.
    for (const auto& e : log.events()) {
      if (!labels[e.project].collaborative && e.entry == proj_first[e.project] &&
          e.entry == dev_first[e.developer]) {
        excluded_dev[e.developer] = true;
      }
    }
  }

  std::vector<MonthlyEntries> rows(static_cast<std::size_t>(last - first) + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].month = first + static_cast<Month>(i);
  for (std::size_t p = 0; p < proj_first.size(); ++p) {
    const Month m = proj_first[p];
    if (m < first || m > last) continue;
    if (variant == P0Variant::Collaborative && !labels[p].collaborative) continue;
    rows[m - first].new_projects += 1.0;
  }
  for (std::size_t d = 0; d < dev_first.size(); ++d) {
    const Month m = dev_first[d];
    if (m < first || m > last || excluded_dev[d]) continue;
    rows[m - first].new_developers += 1.0;
  }
  return rows;
}

InterArrivalFit interarrival_fit(std::span<const WaitObservation> waits, std::size_t min_cohort) {
  InterArrivalFit fit;
  double sum = 0.0;
  for (const auto& w : waits) {
    if (w.censored) {
      ++fit.n_censored;
      continue;
    }
    if (!(w.days >= 0.0)) throw DomainError("waits must be nonnegative");
    sum += w.days;
    ++fit.n_uncensored;
  }
  if (fit.n_uncensored < std::max<std::size_t>(min_cohort, 1)) {
    throw DegenerateInputError("cohort has " + std::to_string(fit.n_uncensored) +
                               " uncensored waits; at least " + std::to_string(min_cohort) +
                               " required");
  }
  fit.mean_days = sum / static_cast<double>(fit.n_uncensored);
  if (!(fit.mean_days > 0.0)) throw DegenerateInputError("all waits are zero");
  fit.lambda = 1.0 / fit.mean_days;
  std::size_t before = 0;
  for (const auto& w : waits) {
    if (!w.censored && w.days < fit.mean_days) ++before;
  }
  fit.prob_before_mean = static_cast<double>(before) / static_cast<double>(fit.n_uncensored);
  fit.exponential_plausible = fit.prob_before_mean > 0.0 && fit.prob_before_mean < 1.0;
  fit.censor_factor = fit.prob_before_mean > 0.0 ? 1.0 / fit.prob_before_mean
                                                 : std::numeric_limits<double>::infinity();
  return fit;
}

std::vector<WaitObservation> cohort_waits(std::span<const ProjectLabel> labels, Month cohort_first,
                                          Month cohort_last, Month observation_end,
                                          const CensorOptions& options) {
  std::vector<WaitObservation> waits;
  for (const auto& l : labels) {
    if (l.founded < cohort_first || l.founded > cohort_last) continue;
    if (l.collaborative) {
      waits.push_back({static_cast<double>(*l.second_developer - l.founded) * options.days_per_month, false});
    } else {
      waits.push_back({static_cast<double>(observation_end - l.founded) * options.days_per_month, true});
    }
  }
  return waits;
}

InterArrivalFit interarrival_fit(const EventLog& log, Month cohort_first, Month cohort_last,
                                 Month observation_end, const CensorOptions& options) {
  const auto labels = classify_collaborative(log, observation_end, options);
  const auto waits = cohort_waits(labels, cohort_first, cohort_last, observation_end, options);
  return interarrival_fit(waits);
}

}  // namespace simon
