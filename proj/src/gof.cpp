#include "simon/gof.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

#include "simon/errors.hpp"
#include "simon/random.hpp"

namespace simon {

double ks_statistic(std::span<const WeightedCount> counts, double rho) {
  double n = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].x < 1 || !(counts[i].weight >= 0.0)) throw DomainError("KS statistic needs sizes >= 1 and non-negative counts");
    if (i > 0 && counts[i].x <= counts[i - 1].x) throw DomainError("KS statistic needs strictly increasing sizes");
    n += counts[i].weight;
  }
  if (!(n > 0.0)) throw DegenerateInputError("KS statistic needs at least one observation");
  double d = 0.0;
  double seen = 0.0;
  std::uint64_t prev_atom = 0;
  for (const auto& [x, count] : counts) {
    // ECDF is constant at seen/n on [prev_atom, x - 1]; F is largest at x - 1.
    if (x - 1 > prev_atom) d = std::max(d, std::abs(seen / n - cdf(x - 1, rho)));
    seen += count;
    d = std::max(d, std::abs(seen / n - cdf(x, rho)));
    prev_atom = x;
  }
  return d;
}

double ks_statistic(const SizeDistribution& dist, double rho) {
  if (dist.total_projects() < 1) throw DegenerateInputError("KS statistic needs at least one observation");
  return ks_statistic(to_weighted(dist), rho);
}

double bootstrap_p_value(std::span<const double> replica_statistics, double observed) {
  if (replica_statistics.empty()) throw DegenerateInputError("no bootstrap statistics");
  const auto hits = std::count_if(replica_statistics.begin(), replica_statistics.end(),
                                  [observed](double d) { return d >= observed; });
  return static_cast<double>(hits) / static_cast<double>(replica_statistics.size());
}

namespace {

std::optional<double> replica_statistic(std::size_t n, const YuleSampler& sampler,
                                        std::uint64_t seed, std::uint64_t stream) {
  Rng rng(seed, stream);
  SizeDistribution synthetic;
  for (std::size_t i = 0; i < n; ++i) synthetic.add(sampler(rng));
  try {
    const auto fit = mle_rho(synthetic);
    return ks_statistic(synthetic, fit.rho_hat);
  } catch (const DegenerateInputError&) {
    return std::nullopt;
  } catch (const ConvergenceError&) {
    return std::nullopt;
  }
}

}  // namespace

GofResult bootstrap_pvalue(const SizeDistribution& dist, const GofOptions& options) {
  if (options.n_bootstrap < 100) throw DomainError("at least 100 bootstrap replicas are required");
  GofResult result;
  const auto fit = mle_rho(dist);
  result.rho_hat = fit.rho_hat;
  result.ks_observed = ks_statistic(dist, fit.rho_hat);
  result.n_bootstrap = options.n_bootstrap;
  result.seed = options.seed;

  const std::size_t n = dist.total_projects();
  const YuleSampler sampler(fit.rho_hat);
  std::vector<std::optional<double>> stats(options.n_bootstrap);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < stats.size(); b = next++) {
      stats[b] = replica_statistic(n, sampler, options.seed, b);
    }
  };
  const unsigned n_threads = std::max(1u, options.jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& s : stats) {
    if (s) {
      result.replica_statistics.push_back(*s);
    } else {
      ++result.failed_replicas;
    }
  }
  if (result.failed_replicas * 100 > options.n_bootstrap) {
    throw DegenerateInputError(std::to_string(result.failed_replicas) + " of " +
                               std::to_string(options.n_bootstrap) +
                               " bootstrap refits failed (limit 1%)");
  }
  result.p_value = bootstrap_p_value(result.replica_statistics, result.ks_observed);
  return result;
}

}  // namespace simon
