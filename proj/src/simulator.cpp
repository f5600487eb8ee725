#include "simon/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "simon/errors.hpp"

namespace simon {

void SimParams::validate() const {
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("p0 must lie in (0, 1)");
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
  if (n_steps < 1) throw DomainError("n_steps must be at least 1");
  for (auto c : checkpoints) {
    if (c < 1 || c > n_steps) throw DomainError("checkpoint outside [1, n_steps]");
  }
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw DomainError("checkpoints must be sorted");
  }
}

void WeightTree::push_back(double w) {
  ++n_;
  values_.push_back(0.0);
  tree_.resize(n_ + 1, 0.0);
  // Initialise the new Fenwick node with the sum of its covered range.
  const std::size_t i = n_;
  const std::size_t lowbit = i & (~i + 1);
  double covered = 0.0;
  for (std::size_t j = i - 1; j > i - lowbit; j -= j & (~j + 1)) covered += tree_[j];
  tree_[i] = covered;
  add(n_ - 1, w);
}

void WeightTree::add(std::size_t index, double delta) {
  values_[index] += delta;
  total_ += delta;
  for (std::size_t i = index + 1; i <= n_; i += i & (~i + 1)) tree_[i] += delta;
}

std::size_t WeightTree::find(double target) const {
  std::size_t pos = 0;
  std::size_t mask = 1;
  while (mask * 2 <= n_) mask *= 2;
  for (; mask != 0; mask /= 2) {
    const std::size_t next = pos + mask;
    if (next <= n_ && tree_[next] <= target) {
      pos = next;
      target -= tree_[next];
    }
  }
  return std::min(pos, n_ - 1);
}

SimState SimState::founded(double alpha) {
  SimState s(alpha);
  s.found_project();
  return s;
}

double SimState::weight(std::uint64_t size) const {
  return alpha_ == 1.0 ? static_cast<double>(size) : std::pow(static_cast<double>(size), alpha_);
}

SizeDistribution SimState::distribution() const {
  SizeDistribution d;
  for (std::size_t x = 1; x < class_counts_.size(); ++x) d.add(x, class_counts_[x]);
  return d;
}

std::size_t SimState::select_project(Rng& rng) const {
  if (alpha_ == 1.0) {
    // Uniform over placed developers selects each project in proportion to size.
    return owner_[rng.below(owner_.size())];
  }
  return tree_.find(rng.uniform() * tree_.total());
}

void SimState::found_project() {
  sizes_.push_back(1);
  owner_.push_back(static_cast<std::uint32_t>(sizes_.size() - 1));
  if (class_counts_.size() < 2) class_counts_.resize(2, 0);
  ++class_counts_[1];
  sum_alpha_weights_ += 1.0;
  if (alpha_ != 1.0) tree_.push_back(1.0);
  ++step_;
}

void SimState::join_project(std::size_t project) {
  const std::uint64_t old_size = sizes_.at(project);
  const std::uint64_t new_size = old_size + 1;
  sizes_[project] = new_size;
  owner_.push_back(static_cast<std::uint32_t>(project));
  if (class_counts_.size() <= new_size) class_counts_.resize(new_size + 1, 0);
  --class_counts_[old_size];
  ++class_counts_[new_size];
  const double delta = weight(new_size) - weight(old_size);
  sum_alpha_weights_ += delta;
  if (alpha_ != 1.0) tree_.add(project, delta);
  ++step_;
}

void step(SimState& state, const SimParams& params, Rng& rng) {
  if (rng.bernoulli(params.p0)) {
    state.found_project();
  } else {
    state.join_project(state.select_project(rng));
  }
}

SimTrace run_stream(const SimParams& params, std::uint64_t stream) {
  params.validate();
  SimTrace trace;
  trace.params = params;
  trace.generator_id = std::string(Rng::kGeneratorId);

  std::vector<std::uint64_t> record = params.checkpoints;
  record.push_back(params.n_steps);
  std::sort(record.begin(), record.end());
  record.erase(std::unique(record.begin(), record.end()), record.end());

  Rng rng(params.seed, stream);
  SimState state = SimState::founded(params.alpha);
  auto next = record.begin();
  auto maybe_record = [&] {
    if (next != record.end() && *next == state.step()) {
      Checkpoint cp;
      cp.step = state.step();
      cp.n_projects = state.n_projects();
      cp.distribution = state.distribution();
      if (params.record_history) cp.project_sizes = state.project_sizes();
      trace.checkpoints.push_back(std::move(cp));
      ++next;
    }
  };
  maybe_record();
  while (state.step() < params.n_steps) {
    step(state, params, rng);
    maybe_record();
  }
  if (params.record_history) trace.arrivals = state.developer_projects();
  return trace;
}

SimTrace run(const SimParams& params) { return run_stream(params, 0); }

double AveragedCheckpoint::frequency(std::uint64_t x) const {
  auto it = mean_counts.find(x);
  if (it == mean_counts.end() || mean_projects <= 0.0) return 0.0;
  return it->second / mean_projects;
}

ReplicateResult replicate(const SimParams& params, std::size_t replicas, unsigned jobs) {
  params.validate();
  if (replicas < 1) throw DomainError("replica count must be at least 1");
  ReplicateResult result;
  result.replicas.resize(replicas);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < replicas; r = next++) {
      result.replicas[r] = run_stream(params, r);
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(replicas)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Merge in replica order so the result is independent of scheduling.
  const auto& first = result.replicas.front().checkpoints;
  result.averaged.resize(first.size());
  const double inv = 1.0 / static_cast<double>(replicas);
  for (std::size_t c = 0; c < first.size(); ++c) {
    auto& avg = result.averaged[c];
    avg.step = first[c].step;
    std::map<std::uint64_t, std::uint64_t> sums;
    std::uint64_t projects = 0;
    for (const auto& rep : result.replicas) {
      const auto& cp = rep.checkpoints[c];
      projects += cp.n_projects;
      for (const auto& [x, n] : cp.distribution.counts()) sums[x] += n;
    }
    avg.mean_projects = static_cast<double>(projects) * inv;
    for (const auto& [x, n] : sums) avg.mean_counts[x] = static_cast<double>(n) * inv;
  }
  return result;
}

EventLog to_event_log(const SimTrace& trace, std::uint64_t arrivals_per_month) {
  if (arrivals_per_month < 1) throw DomainError("arrivals_per_month must be at least 1");
  if (trace.arrivals.empty()) throw DomainError("trace was recorded without history");
  EventLogBuilder builder;
  for (std::size_t i = 0; i < trace.arrivals.size(); ++i) {
    builder.add("d" + std::to_string(i), "p" + std::to_string(trace.arrivals[i]),
                static_cast<Month>(i / arrivals_per_month));
  }
  return std::move(builder).build();
}

}  // namespace simon
