#include "simon/yule.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "simon/errors.hpp"

namespace simon {

namespace {

void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive and finite");
}

void check_args(std::uint64_t x, double rho) {
  if (x < 1) throw DomainError("Yule-Simon support starts at x = 1");
  check_rho(rho);
}

// Stirling remainder of log Gamma(z) - [(z - 1/2) log z - z + log(2 pi)/2],
// accurate to ~1e-15 for z >= 20.
double stirling_remainder(double z) {
  const double r = 1.0 / z;
  const double r2 = r * r;
  return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0))));
}

// log Gamma(x) - log Gamma(x + b) for x >= 1, b > 0. For large x the two
// log-Gamma values are ~x log x, so their difference is taken analytically to
// keep relative accuracy of the exponentiated result.
double log_gamma_ratio(double x, double b) {
  if (x < 20.0) return std::lgamma(x) - std::lgamma(x + b);
  return -(x - 0.5) * std::log1p(b / x) - b * std::log(x + b) + b + stirling_remainder(x) -
         stirling_remainder(x + b);
}

}  // namespace

double rho_from_p0(double p0) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie in (0, 1)");
  return 1.0 / (1.0 - p0);
}

double p0_from_rho(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho)) throw DomainError("rho must exceed 1");
  return 1.0 - 1.0 / rho;
}

double log_pmf(std::uint64_t x, double rho) {
  check_args(x, rho);
  if (x == 1) return std::log(rho) - std::log1p(rho);
  return std::log(rho) + std::lgamma(rho + 1.0) +
         log_gamma_ratio(static_cast<double>(x), rho + 1.0);
}

double pmf(std::uint64_t x, double rho) {
  check_args(x, rho);
  if (x == 1) return rho / (rho + 1.0);
  return std::exp(log_pmf(x, rho));
}

double log_survival(std::uint64_t x, double rho) {
  check_rho(rho);
  if (x == 0) return 0.0;
  if (x == 1) return -std::log1p(rho);
  return std::log(static_cast<double>(x)) + log_pmf(x, rho) - std::log(rho);
}

double survival(std::uint64_t x, double rho) {
  check_rho(rho);
  if (x == 0) return 1.0;
  if (x == 1) return 1.0 / (rho + 1.0);
  return std::exp(log_survival(x, rho));
}

double cdf(std::uint64_t x, double rho) {
  check_rho(rho);
  if (x == 0) return 0.0;
  return 1.0 - survival(x, rho);
}

YuleSampler::YuleSampler(double rho, std::size_t x_cache) : rho_(rho) {
  check_rho(rho);
  // Tail mass below this is left to the exact bisection path.
  constexpr double kTableFloor = 1e-10;
  double p = rho / (rho + 1.0);
  survival_.reserve(std::min<std::size_t>(x_cache, 4096));
  for (std::size_t x = 1; x <= std::max<std::size_t>(x_cache, 1); ++x) {
    if (x > 1) p *= static_cast<double>(x - 1) / (static_cast<double>(x) + rho);
    const double s = static_cast<double>(x) * p / rho;
    survival_.push_back(s);
    if (s < kTableFloor) break;
  }
}

std::uint64_t YuleSampler::operator()(Rng& rng) const {
  // X = min{x : P(X > x) <= v} with v uniform on (0, 1].
  const double v = rng.uniform_open_low();
  auto it = std::partition_point(survival_.begin(), survival_.end(),
                                 [v](double s) { return s > v; });
  if (it != survival_.end()) return static_cast<std::uint64_t>(it - survival_.begin()) + 1;
  return invert_tail(v);
}

std::uint64_t YuleSampler::invert_tail(double v) const {
  constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
  const double log_v = std::log(v);
  std::uint64_t lo = survival_.size();  // survival(lo) > v
  // Asymptotic inversion of survival(x) ~ Gamma(rho + 1) x^-rho for a first guess.
  const double guess = std::exp((std::lgamma(rho_ + 1.0) - log_v) / rho_);
  std::uint64_t hi = lo + 1;
  if (guess > static_cast<double>(hi)) {
    hi = guess >= static_cast<double>(kCap) ? kCap : static_cast<std::uint64_t>(guess);
  }
  while (log_survival(hi, rho_) > log_v) {
    if (hi >= kCap) return kCap;
    lo = hi;
    hi = hi > kCap / 2 ? kCap : hi * 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (log_survival(mid, rho_) > log_v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::vector<std::uint64_t> sample(double rho, std::size_t n, Rng& rng) {
  if (n < 1) throw DomainError("sample size must be at least 1");
  YuleSampler sampler(rho);
  std::vector<std::uint64_t> out(n);
  for (auto& v : out) v = sampler(rng);
  return out;
}

WeightedCounts to_weighted(const SizeDistribution& dist) {
  WeightedCounts out;
  out.reserve(dist.counts().size());
  for (const auto& [x, n] : dist.counts()) out.push_back({x, static_cast<double>(n)});
  return out;
}

double log_likelihood(std::span<const WeightedCount> counts, double rho, std::uint64_t min_size) {
  double ll = 0.0;
  double total = 0.0;
  for (const auto& c : counts) {
    if (c.x < min_size || c.weight == 0.0) continue;
    ll += c.weight * log_pmf(c.x, rho);
    total += c.weight;
  }
  if (min_size > 1) ll -= total * log_survival(min_size - 1, rho);
  return ll;
}

namespace {

struct Objective {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<WeightedCount> kept;
  double total = 0.0;
  std::uint64_t min_size = 1;

  double value(double t) const { return log_likelihood(kept, std::exp(t), min_size); }

  // First and second derivative of the log-likelihood in t = log rho.
  std::pair<double, double> derivatives(double t) const {
    using boost::math::digamma;
    using boost::math::trigamma;
    const double rho = std::exp(t);
    double score = total / rho + total * digamma(static_cast<double>(min_size) + rho);
    double hess = -total / (rho * rho) + total * trigamma(static_cast<double>(min_size) + rho);
    for (std::size_t i = 0; i < x.size(); ++i) {
      score -= w[i] * digamma(x[i] + rho + 1.0);
      hess -= w[i] * trigamma(x[i] + rho + 1.0);
    }
    return {rho * score, rho * rho * hess + rho * score};
  }
};

}  // namespace

YuleFit mle_rho(std::span<const WeightedCount> counts, const FitOptions& options) {
  if (options.min_size < 1) throw DomainError("min_size must be at least 1");
  Objective obj;
  obj.min_size = options.min_size;
  bool above_min = false;
  for (const auto& c : counts) {
    if (c.x < 1) throw DomainError("sizes must be positive");
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) throw DomainError("counts must be finite and >= 0");
    if (c.x < options.min_size || c.weight == 0.0) continue;
    obj.kept.push_back(c);
    obj.x.push_back(static_cast<double>(c.x));
    obj.w.push_back(c.weight);
    obj.total += c.weight;
    if (c.x > options.min_size) above_min = true;
  }
  if (obj.total < 2.0) throw DegenerateInputError("at least two observations are required");
  if (!above_min) {
    throw DegenerateInputError("all observations at the smallest size: likelihood has no maximum");
  }

  // Coarse scan for a bracket around the maximiser, widened on boundary hits.
  constexpr int kGrid = 25;
  double lo = std::log(1e-3), hi = std::log(1e3);
  const double widest = std::log(1e12);
  std::vector<double> grid(kGrid), values(kGrid);
  std::size_t best = 0;
  while (true) {
    for (int i = 0; i < kGrid; ++i) {
      grid[i] = lo + (hi - lo) * i / (kGrid - 1);
      values[i] = obj.value(grid[i]);
    }
    best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    const bool at_low = best == 0 && lo > -widest;
    const bool at_high = best == kGrid - 1 && hi < widest;
    if (!at_low && !at_high) break;
    if (at_low) lo = std::max(-widest, lo - std::log(1e3));
    if (at_high) hi = std::min(widest, hi + std::log(1e3));
  }
  if (best == 0 || best == kGrid - 1) {
    throw ConvergenceError("likelihood maximum at the edge of the search range",
                           std::exp(grid[best]));
  }

  double a = grid[best - 1], b = grid[best + 1];
  double t = grid[best];
  int iter = 0;
  bool converged = false;
  while (iter < options.max_iterations) {
    ++iter;
    auto [g, h] = obj.derivatives(t);
    if (g > 0.0) a = t; else b = t;
    double next = (h < 0.0) ? t - g / h : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double delta = std::abs(next - t);
    t = next;
    if (delta < options.tolerance || b - a < options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("rho maximisation did not converge in " +
                               std::to_string(options.max_iterations) + " iterations",
                           std::exp(t));
  }

  YuleFit fit;
  fit.rho_hat = std::exp(t);
  fit.log_likelihood = obj.value(t);
  fit.n_observations = obj.total;
  fit.domain_flag = fit.rho_hat > 1.0;
  fit.derived_p0 = 1.0 - 1.0 / fit.rho_hat;
  fit.iterations = iter;
  return fit;
}

YuleFit mle_rho(const SizeDistribution& dist, const FitOptions& options) {
  return mle_rho(to_weighted(dist), options);
}

}  // namespace simon
