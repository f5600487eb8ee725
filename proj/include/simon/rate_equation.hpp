#pragma once

// Deterministic mean-field iteration of the expected size-class counts n(x, N)
// and the closed-form stationary solution n*(x, N) = rho B(x, rho + 1) N p0.

#include <cstdint>
#include <span>
#include <vector>

namespace simon {

struct MasterState {
  std::uint64_t N = 0;
  std::vector<double> n;          // n[x - 1] = expected n(x, N) for x = 1..x_trunc
  double overflow_projects = 0.0;  // expected number of projects larger than x_trunc
  double overflow_mass = 0.0;      // their expected total size

  double count(std::uint64_t x) const { return x >= 1 && x <= n.size() ? n[x - 1] : 0.0; }
  // Σ x n(x, N) including the overflow bin; equals N up to round-off.
  double total_mass() const;
  double total_projects() const;
};

struct MasterOptions {
  std::uint64_t x_trunc = 1000;
};

// Iterates from n(1, 1) = 1 up to N = n_max_steps with
//   Δn(1, N) = p0 - (1 - p0) n(1, N) / N
//   Δn(x, N) = (1 - p0) [(x - 1) n(x - 1, N) - x n(x, N)] / N,  x >= 2
// and returns the states at the requested steps (sorted; out-of-range ignored).
std::vector<MasterState> iterate_master(double p0, std::uint64_t n_max_steps,
                                        std::span<const std::uint64_t> record_at,
                                        const MasterOptions& options = {});

// n*(x, N) for x = 1..x_max (index x - 1).
std::vector<double> steady_state(double p0, std::uint64_t N, std::uint64_t x_max);

}  // namespace simon
