#include "simon/em.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "simon/errors.hpp"

namespace simon {

void EMConfig::validate() const {
  if (!(epsilon > 0.0)) throw DomainError("EM epsilon must be positive");
  if (max_iterations < 1) throw DomainError("EM max_iterations must be at least 1");
  if (rho_init && !(*rho_init > 0.0)) throw DomainError("EM rho_init must be positive");
}

EMResult em_fit(std::span<const WeightedCount> counts, const EMConfig& config) {
  config.validate();
  EMResult result;
  std::size_t sizes_above_one = 0;
  for (const auto& c : counts) {
    if (c.weight <= 0.0) continue;
    if (c.x == 1) {
      result.observed_singletons += c.weight;
    } else {
      result.multi_developer_projects += c.weight;
      result.corrected.push_back(c);
      ++sizes_above_one;
    }
  }
  if (sizes_above_one < 2) {
    throw DegenerateInputError("EM correction needs at least two distinct sizes >= 2");
  }

  double rho;
  if (config.rho_init) {
    rho = *config.rho_init;
  } else if (config.start == EmStart::TruncatedFit) {
    rho = mle_rho(counts, FitOptions{.min_size = 2}).rho_hat;
  } else {
    rho = mle_rho(counts).rho_hat;
  }
  result.rho_trace.push_back(rho);
  result.corrected.insert(result.corrected.begin(), WeightedCount{1, 0.0});

  const double tail = result.multi_developer_projects;
  for (int it = 1; it <= config.max_iterations; ++it) {
    // E: singleton count that makes the x >= 2 block Yule(rho)-proportioned.
    const double f1 = rho / (rho + 1.0);
    result.latent_singletons = f1 / (1.0 - f1) * tail;  // = rho * tail
    result.corrected.front().weight = result.latent_singletons;
    // M
    const double next = mle_rho(result.corrected).rho_hat;
    result.rho_trace.push_back(next);
    result.iterations = it;
    const double delta = std::abs(next - rho);
    rho = next;
    if (delta < config.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.rho_col = rho;
  return result;
}

EMResult em_fit(const SizeDistribution& dist, const EMConfig& config) {
  return em_fit(to_weighted(dist), config);
}

std::vector<CollaborativeEntry> predicted_collaborative_entries(
    std::span<const MonthlyEM> em_series, std::span<const MonthlyCount> new_developers,
    const MonthMask& mask) {
  std::map<Month, double> collaborative;
  std::map<Month, double> developers;
  for (const auto& m : em_series) {
    if (mask.is_masked(m.month)) continue;
    if (!collaborative.emplace(m.month, m.result.collaborative_projects()).second) {
      throw DomainError("duplicate month " + std::to_string(m.month) + " in EM series");
    }
  }
  for (const auto& d : new_developers) {
    if (mask.is_masked(d.month)) continue;
    if (!developers.emplace(d.month, d.count).second) {
      throw DomainError("duplicate month " + std::to_string(d.month) + " in developer counts");
    }
  }
  if (collaborative.size() != developers.size()) {
    throw DomainError("EM series and developer counts cover different months");
  }
  for (auto a = collaborative.begin(), b = developers.begin(); a != collaborative.end(); ++a, ++b) {
    if (a->first != b->first) {
      throw DomainError("EM series and developer counts are misaligned at month " +
                        std::to_string(a->first));
    }
  }

  std::vector<CollaborativeEntry> out;
  for (auto it = collaborative.begin(); it != collaborative.end(); ++it) {
    auto prev = collaborative.find(it->first - 1);
    if (prev == collaborative.end()) continue;
    CollaborativeEntry row;
    row.month = it->first;
    row.predicted_new_collaborative = it->second - prev->second;
    row.new_developers = developers.at(it->first);
    row.implied_p0 = row.new_developers > 0.0 ? row.predicted_new_collaborative / row.new_developers
                                              : std::numeric_limits<double>::quiet_NaN();
    out.push_back(row);
  }
  return out;
}

}  // namespace simon
