#pragma once

// Monte Carlo generator of the Simon entry-and-growth process. One developer
// arrives per step; with probability p0 she founds a new project of size 1,
// otherwise she joins existing project r with probability x_r^alpha / Σ x^alpha.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simon/random.hpp"
#include "simon/snapshot.hpp"

namespace simon {

struct SimParams {
  double p0 = 0.5;
  double alpha = 1.0;
  std::uint64_t n_steps = 1;
  std::uint64_t seed = 0;
  // Steps at which the size distribution is recorded. n_steps is always
  // recorded. Must lie in [1, n_steps].
  std::vector<std::uint64_t> checkpoints;
  // Keep per-project sizes at checkpoints and the project joined by every
  // developer. Meant for small runs.
  bool record_history = false;

  // Throws DomainError on invalid values.
  void validate() const;
};

// Prefix-sum tree over project weights x^alpha, used for alpha != 1.
class WeightTree {
 public:
  void push_back(double w);
  void add(std::size_t index, double delta);
  double total() const { return total_; }
  // Smallest index whose inclusive prefix sum exceeds target, target in [0, total).
  std::size_t find(double target) const;
  std::size_t size() const { return n_; }

 private:
  std::vector<double> tree_;  // 1-based Fenwick array
  std::vector<double> values_;
  std::size_t n_ = 0;
  double total_ = 0.0;
};

class SimState {
 public:
  // State after the forced initial founding: one project of size 1, step 1.
  static SimState founded(double alpha = 1.0);

  std::uint64_t step() const { return step_; }
  std::size_t n_projects() const { return sizes_.size(); }
  const std::vector<std::uint64_t>& project_sizes() const { return sizes_; }
  // Σ_r x_r^alpha, maintained incrementally.
  double sum_alpha_weights() const { return sum_alpha_weights_; }
  // Project joined (or founded) by each developer, in arrival order.
  const std::vector<std::uint32_t>& developer_projects() const { return owner_; }
  double alpha() const { return alpha_; }
  // n(x) maintained incrementally; index x, entry 0 unused.
  const std::vector<std::uint64_t>& size_class_counts() const { return class_counts_; }
  SizeDistribution distribution() const;

  // Project an arriving developer would join, drawn with probability
  // proportional to x^alpha. Does not modify the state.
  std::size_t select_project(Rng& rng) const;

  void found_project();
  void join_project(std::size_t project);

 private:
  explicit SimState(double alpha) : alpha_(alpha) {}
  double weight(std::uint64_t size) const;

  double alpha_;
  std::uint64_t step_ = 0;
  std::vector<std::uint64_t> sizes_;
  std::vector<std::uint32_t> owner_;
  std::vector<std::uint64_t> class_counts_{0};
  double sum_alpha_weights_ = 0.0;
  WeightTree tree_;
};

// One arrival: found with probability p0, otherwise join.
void step(SimState& state, const SimParams& params, Rng& rng);

struct Checkpoint {
  std::uint64_t step = 0;
  std::uint64_t n_projects = 0;
  SizeDistribution distribution;
  std::vector<std::uint64_t> project_sizes;  // only with record_history
};

struct SimTrace {
  SimParams params;
  std::string generator_id;
  std::vector<Checkpoint> checkpoints;
  // Project index joined by each developer (only with record_history).
  std::vector<std::uint32_t> arrivals;

  const Checkpoint& final_checkpoint() const { return checkpoints.back(); }
};

// Runs the process from the forced founding at step 1 to params.n_steps,
// using stream 0 of params.seed.
SimTrace run(const SimParams& params);
// Same, with an explicit stream (replica index).
SimTrace run_stream(const SimParams& params, std::uint64_t stream);

struct AveragedCheckpoint {
  std::uint64_t step = 0;
  double mean_projects = 0.0;
  std::map<std::uint64_t, double> mean_counts;  // mean n(x) across replicas

  double frequency(std::uint64_t x) const;
};

struct ReplicateResult {
  std::vector<AveragedCheckpoint> averaged;
  std::vector<SimTrace> replicas;  // index r used stream r
};

// R independent replicas on streams 0..R-1 of params.seed, run on up to
// `jobs` threads; results are merged by replica index.
ReplicateResult replicate(const SimParams& params, std::size_t replicas, unsigned jobs = 1);

// Event log of a recorded run: developer i joins their project in month
// floor(i / arrivals_per_month). Requires record_history.
EventLog to_event_log(const SimTrace& trace, std::uint64_t arrivals_per_month);

}  // namespace simon
