// simon: command-line driver for the simulator, fitting and estimators.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "commands.hpp"
#include "simon/errors.hpp"
#include "simon/report.hpp"

using namespace simon;
using namespace simon::cli;

namespace {

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--output-dir,-o", common.output_dir, "Directory for tables and manifest")
      ->capture_default_str();
  cmd->add_option("--jobs,-j", common.jobs, "Worker threads for replicas and bootstrap")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
}

void add_distribution_input(CLI::App* cmd, DistributionInput& in) {
  cmd->add_option("input", in.input, "size,count table, one value per line, or event file with --month/--months")
      ->required();
  cmd->add_option("--month", in.month, "Fit the snapshot of this month (event input)");
  cmd->add_option("--months", in.months, "Fit every month in a:b (event input)");
  cmd->add_option("--mask", in.mask, "Months to skip, one per line");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simon growth process: simulation, Yule-Simon fitting and membership estimators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SIMON_VERSION);

  Common common;
  for (int i = 0; i < argc; ++i) common.invocation += (i ? " " : "") + std::string(argv[i]);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run the Simon process and write its size-distribution trace");
  c_sim->add_option("--p0", sim.p0, "Founding probability in (0, 1)")->required();
  c_sim->add_option("--steps", sim.steps, "Number of arriving developers N")->required();
  c_sim->add_option("--alpha", sim.alpha, "Size-preference exponent")->capture_default_str();
  c_sim->add_option("--replicas", sim.replicas, "Independent replicas")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Master seed")->required();
  c_sim->add_option("--checkpoints", sim.checkpoints, "Extra steps to record")->delimiter(',');
  c_sim->add_option("--events-per-month", sim.events_per_month,
                    "Also write events.csv with this many arrivals per month");
  add_common(c_sim, common);

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "Monthly summaries, distributions, entry/exit and growth tables");
  c_an->add_option("events", an.events, "Event file")->required();
  c_an->add_option("--months", an.months, "Restrict to months a:b");
  c_an->add_option("--mask", an.mask, "Months to flag and skip in estimates");
  c_an->add_option("--window", an.window_months, "Window for the size-dependent growth fit, months")
      ->capture_default_str();
  c_an->add_option("--min-per-bin", an.min_per_bin, "Minimum projects per size bin")->capture_default_str();
  add_common(c_an, common);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Maximum-likelihood Yule-Simon rho");
  add_distribution_input(c_fit, fit.in);
  c_fit->add_option("--min-size", fit.min_size, "Fit conditional on size >= this")->capture_default_str();
  add_common(c_fit, common);

  GofArgs gof;
  auto* c_gof = app.add_subcommand("gof", "KS distance with semi-parametric bootstrap p-value");
  add_distribution_input(c_gof, gof.in);
  c_gof->add_option("--bootstrap", gof.bootstrap, "Bootstrap replicas B (>= 100)")->capture_default_str();
  c_gof->add_option("--seed", gof.seed, "Bootstrap seed")->capture_default_str();
  add_common(c_gof, common);

  EmArgs em;
  auto* c_em = app.add_subcommand("em", "EM correction of the collaborative singleton count");
  add_distribution_input(c_em, em.in);
  c_em->add_option("--epsilon", em.epsilon, "Halt when |delta rho| < epsilon")->capture_default_str();
  c_em->add_option("--max-iterations", em.max_iterations, "Iteration cap")->capture_default_str();
  c_em->add_option("--start", em.start, "Initial rho: full (fit on all data) or truncated (fit on x >= 2)")
      ->capture_default_str();
  c_em->add_option("--rho-init", em.rho_init, "Explicit initial rho");
  add_common(c_em, common);

  P0Args p0;
  auto* c_p0 = app.add_subcommand("p0", "Monthly founding probability series and inter-arrival fit");
  c_p0->add_option("events", p0.events, "Event file")->required();
  c_p0->add_option("--variant", p0.variant, "all or collaborative")->capture_default_str();
  c_p0->add_option("--months", p0.months, "Restrict to months a:b");
  c_p0->add_option("--mask", p0.mask, "Months to skip");
  c_p0->add_option("--observation-end", p0.observation_end, "Last observed month (default: end of log)");
  c_p0->add_option("--horizon-days", p0.horizon_days, "Censor horizon in days")->capture_default_str();
  c_p0->add_option("--cohort", p0.cohort, "Founding months a:b for the inter-arrival fit");
  c_p0->add_option("--min-cohort", p0.min_cohort, "Minimum uncensored waits")->capture_default_str();
  add_common(c_p0, common);

  RateEqArgs re;
  auto* c_re = app.add_subcommand("rateeq", "Iterate the rate equations and evaluate the stationary solution");
  c_re->add_option("--p0", re.p0, "Founding probability in (0, 1)")->required();
  c_re->add_option("--steps", re.steps, "Iterate up to N")->required();
  c_re->add_option("--record", re.record, "Steps to record (default: final)")->delimiter(',');
  c_re->add_option("--x-trunc", re.x_trunc, "Largest tracked size class")->capture_default_str();
  c_re->add_option("--x-max", re.x_max, "Largest size written")->capture_default_str();
  add_common(c_re, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(common, sim);
    if (c_an->parsed()) return cmd_analyze(common, an);
    if (c_fit->parsed()) return cmd_fit(common, fit);
    if (c_gof->parsed()) return cmd_gof(common, gof);
    if (c_em->parsed()) return cmd_em(common, em);
    if (c_p0->parsed()) return cmd_p0(common, p0);
    if (c_re->parsed()) return cmd_rateeq(common, re);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (best point " << e.best_point() << ")\n";
    return kExitNonConvergence;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
