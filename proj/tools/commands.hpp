#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace simon::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNonConvergence = 4;

struct Common {
  std::filesystem::path output_dir = ".";
  unsigned jobs = 1;
  std::string invocation;  // argv joined, recorded in the manifest
};

struct SimulateArgs {
  double p0 = 0.0;
  std::uint64_t steps = 0;
  double alpha = 1.0;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> checkpoints;
  // When > 0, also write the run as an event file with this many arrivals per month.
  std::uint64_t events_per_month = 0;
};

struct AnalyzeArgs {
  std::filesystem::path events;
  std::string months;  // "a:b" inclusive, index or YYYY-MM; empty for the whole log
  std::filesystem::path mask;
  int window_months = 12;
  std::size_t min_per_bin = 20;
};

// Input for fit / gof / em: a size,count table, a one-column sample, or an
// event file together with --month / --months.
struct DistributionInput {
  std::filesystem::path input;
  std::string month;
  std::string months;
  std::filesystem::path mask;
};

struct FitArgs {
  DistributionInput in;
  std::uint64_t min_size = 1;
};

struct GofArgs {
  DistributionInput in;
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 0;
};

struct EmArgs {
  DistributionInput in;
  double epsilon = 1e-4;
  int max_iterations = 500;
  std::string start = "full";
  std::optional<double> rho_init;
};

struct P0Args {
  std::filesystem::path events;
  std::string variant = "all";
  std::string months;
  std::filesystem::path mask;
  std::string observation_end;
  double horizon_days = 450.0;
  std::string cohort;
  std::size_t min_cohort = 30;
};

struct RateEqArgs {
  double p0 = 0.0;
  std::uint64_t steps = 0;
  std::vector<std::uint64_t> record;
  std::uint64_t x_trunc = 1000;
  std::uint64_t x_max = 100;
};

int cmd_simulate(const Common& common, const SimulateArgs& args);
int cmd_analyze(const Common& common, const AnalyzeArgs& args);
int cmd_fit(const Common& common, const FitArgs& args);
int cmd_gof(const Common& common, const GofArgs& args);
int cmd_em(const Common& common, const EmArgs& args);
int cmd_p0(const Common& common, const P0Args& args);
int cmd_rateeq(const Common& common, const RateEqArgs& args);

}  // namespace simon::cli
