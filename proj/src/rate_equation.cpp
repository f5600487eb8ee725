#include "simon/rate_equation.hpp"

#include <algorithm>
#include <cmath>

#include "simon/errors.hpp"
#include "simon/yule.hpp"

namespace simon {

double MasterState::total_mass() const {
  double mass = overflow_mass;
  for (std::size_t i = 0; i < n.size(); ++i) mass += static_cast<double>(i + 1) * n[i];
  return mass;
}

double MasterState::total_projects() const {
  double total = overflow_projects;
  for (double v : n) total += v;
  return total;
}

std::vector<MasterState> iterate_master(double p0, std::uint64_t n_max_steps,
                                        std::span<const std::uint64_t> record_at,
                                        const MasterOptions& options) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie in (0, 1)");
  if (n_max_steps < 1) throw DomainError("n_max_steps must be at least 1");
  if (options.x_trunc < 1) throw DomainError("x_trunc must be at least 1");

  std::vector<std::uint64_t> record(record_at.begin(), record_at.end());
  std::sort(record.begin(), record.end());
  record.erase(std::unique(record.begin(), record.end()), record.end());
  auto next = std::lower_bound(record.begin(), record.end(), std::uint64_t{1});

  const std::size_t T = options.x_trunc;
  const double q = 1.0 - p0;
  MasterState state;
  state.N = 1;
  state.n.assign(T, 0.0);
  state.n[0] = 1.0;

  std::vector<MasterState> out;
  auto maybe_record = [&] {
    if (next != record.end() && *next == state.N) {
      out.push_back(state);
      ++next;
    }
  };
  maybe_record();

  auto& n = state.n;
  while (state.N < n_max_steps && next != record.end()) {
    const double inv_N = 1.0 / static_cast<double>(state.N);
    // Sizes above N + 1 cannot be occupied yet.
    const std::size_t top = static_cast<std::size_t>(std::min<std::uint64_t>(T, state.N + 1));

    const double outflow = q * static_cast<double>(T) * n[T - 1] * inv_N;
    state.overflow_mass += q * state.overflow_mass * inv_N + static_cast<double>(T + 1) * outflow;
    state.overflow_projects += outflow;

    // Descending so each update reads the previous step's n(x - 1).
    for (std::size_t x = top; x >= 2; --x) {
      const double xd = static_cast<double>(x);
      n[x - 1] += q * ((xd - 1.0) * n[x - 2] - xd * n[x - 1]) * inv_N;
    }
    n[0] += p0 - q * n[0] * inv_N;
    ++state.N;
    maybe_record();
  }
  return out;
}

std::vector<double> steady_state(double p0, std::uint64_t N, std::uint64_t x_max) {
  const double rho = rho_from_p0(p0);
  if (N < 1) throw DomainError("N must be at least 1");
  const double scale = static_cast<double>(N) * p0;
  std::vector<double> out(x_max);
  for (std::uint64_t x = 1; x <= x_max; ++x) out[x - 1] = scale * pmf(x, rho);
  return out;
}

}  // namespace simon
