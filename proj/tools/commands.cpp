#include "commands.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "simon/em.hpp"
#include "simon/errors.hpp"
#include "simon/estimators.hpp"
#include "simon/gof.hpp"
#include "simon/rate_equation.hpp"
#include "simon/report.hpp"
#include "simon/simulator.hpp"
#include "simon/snapshot.hpp"
#include "simon/yule.hpp"

#ifndef SIMON_VERSION
#define SIMON_VERSION "0.0.0"
#endif

namespace simon::cli {

namespace fs = std::filesystem;

namespace {

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

// Collects the manifest of one command and writes it on scope exit, also
// when the command fails.
class Session {
 public:
  Session(const Common& common, std::string command)
      : common_(common), start_(std::chrono::steady_clock::now()), uncaught_(std::uncaught_exceptions()) {
    std::error_code ec;
    fs::create_directories(common.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + common.output_dir.string() + ": " + ec.message());
    manifest.set("command", command);
    manifest.set("version", SIMON_VERSION);
    manifest.set("generator", std::string(Rng::kGeneratorId));
    manifest.set("jobs", common.jobs);
    manifest.set("invocation", common.invocation);
  }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  ~Session() {
    try {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (std::uncaught_exceptions() > uncaught_ && status_ == "ok") status_ = "failed";
      manifest.set("outputs", outputs_);
      manifest.set("status", status_);
      manifest.set("duration_seconds", secs);
      manifest.write(common_.output_dir / "manifest.txt");
    } catch (...) {
      std::cerr << "warning: manifest could not be written\n";
    }
  }

  void input(const std::string& key, const fs::path& path) {
    if (path.empty()) return;
    manifest.set(key, path.string());
    manifest.set(key + "_sha256", sha256_file(path));
  }

  void write(const std::string& name, const Table& table) {
    table.write(common_.output_dir / name);
    if (!outputs_.empty()) outputs_ += ';';
    outputs_ += name;
  }

  void set_status(std::string s) { status_ = std::move(s); }

  Manifest manifest;

 private:
  const Common& common_;
  std::chrono::steady_clock::time_point start_;
  int uncaught_;
  std::string outputs_;
  std::string status_ = "ok";
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

EventLog load_events(const fs::path& path) {
  auto in = open_input(path);
  EventLog log = parse_events(in);
  if (log.empty()) throw DegenerateInputError("event file " + path.string() + " has no events");
  return log;
}

MonthMask load_mask(const fs::path& path) {
  if (path.empty()) return {};
  auto in = open_input(path);
  return parse_mask(in);
}

Month month_arg(const std::string& text, const char* what) {
  auto m = parse_month(text);
  if (!m) throw DomainError(std::string("cannot parse ") + what + " '" + text + "'");
  return *m;
}

// "a:b" -> [a, b]; empty -> fallback.
std::pair<Month, Month> range_arg(const std::string& text, std::pair<Month, Month> fallback) {
  if (text.empty()) return fallback;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("month range must look like a:b, got '" + text + "'");
  const Month a = month_arg(text.substr(0, colon), "range start");
  const Month b = month_arg(text.substr(colon + 1), "range end");
  if (b < a) throw DomainError("month range end precedes its start");
  return {a, b};
}

std::string range_text(std::pair<Month, Month> r) {
  return std::to_string(r.first) + ":" + std::to_string(r.second);
}

struct LabeledDistribution {
  std::optional<Month> month;
  SizeDistribution dist;
};

std::string month_cell(const std::optional<Month>& m) { return m ? std::to_string(*m) : std::string(); }

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, delim)) out.push_back(cur);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<std::uint64_t> parse_count(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos || t.size() > 19) return std::nullopt;
  return std::stoull(t);
}

// "size,count" rows or one value per row; a non-numeric first row is a header.
SizeDistribution parse_distribution_file(const fs::path& path) {
  auto in = open_input(path);
  std::vector<RowError> errors;
  SizeDistribution dist;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  std::optional<std::size_t> width;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t, ',');
    const bool is_first = first;
    first = false;
    if (is_first && !parse_count(fields[0])) continue;  // header
    if (!width) width = fields.size();
    if (fields.size() != *width || fields.size() > 2) {
      errors.push_back({lineno, "expected " + std::to_string(width.value_or(1)) + " field(s)"});
      continue;
    }
    const auto x = parse_count(fields[0]);
    if (!x || *x < 1) {
      errors.push_back({lineno, "size must be a positive integer"});
      continue;
    }
    std::uint64_t n = 1;
    if (fields.size() == 2) {
      const auto c = parse_count(fields[1]);
      if (!c) {
        errors.push_back({lineno, "count must be a nonnegative integer"});
        continue;
      }
      n = *c;
    }
    if (n > 0) dist.add(*x, n);
  }
  if (!errors.empty()) throw ParseError(std::move(errors));
  if (dist.empty()) throw DegenerateInputError("distribution file " + path.string() + " is empty");
  return dist;
}

std::vector<LabeledDistribution> load_distributions(Session& session, const DistributionInput& in) {
  session.input("input", in.input);
  std::vector<LabeledDistribution> out;
  if (in.month.empty() && in.months.empty()) {
    if (!in.mask.empty()) throw DomainError("--mask applies only to event input with --month/--months");
    out.push_back({std::nullopt, parse_distribution_file(in.input)});
    session.manifest.set("input_format", "distribution");
    return out;
  }
  if (!in.month.empty() && !in.months.empty()) throw DomainError("give either --month or --months");
  const EventLog log = load_events(in.input);
  const MonthMask mask = load_mask(in.mask);
  session.input("mask", in.mask);
  session.manifest.set("input_format", "events");
  std::pair<Month, Month> range;
  if (!in.month.empty()) {
    const Month m = month_arg(in.month, "--month");
    range = {m, m};
  } else {
    range = range_arg(in.months, {log.first_month(), log.last_month()});
  }
  session.manifest.set("months", range_text(range));
  for (Month m = range.first; m <= range.second; ++m) {
    if (mask.is_masked(m)) continue;
    out.push_back({m, project_size_distribution(snapshot_at(log, m))});
  }
  return out;
}

void note_skip(Session& s, std::string& skipped, const std::optional<Month>& month, const std::exception& e) {
  std::cerr << "month " << month_cell(month) << " skipped: " << e.what() << "\n";
  if (!skipped.empty()) skipped += ';';
  skipped += month_cell(month);
  s.manifest.set("skipped_months", skipped);
}

}  // namespace

int cmd_simulate(const Common& common, const SimulateArgs& args) {
  Session s(common, "simulate");
  SimParams params;
  params.p0 = args.p0;
  params.alpha = args.alpha;
  params.n_steps = args.steps;
  params.seed = args.seed;
  params.checkpoints = args.checkpoints;
  params.record_history = args.events_per_month > 0;
  s.manifest.set("p0", args.p0);
  s.manifest.set("alpha", args.alpha);
  s.manifest.set("steps", args.steps);
  s.manifest.set("replicas", args.replicas);
  s.manifest.set("seed", args.seed);
  std::string cps;
  for (auto c : args.checkpoints) cps += (cps.empty() ? "" : ";") + std::to_string(c);
  s.manifest.set("checkpoints", cps);
  s.manifest.set("events_per_month", args.events_per_month);
  params.validate();
  if (args.replicas < 1) throw DomainError("--replicas must be at least 1");
  if (args.events_per_month > 0 && args.replicas != 1) {
    throw DomainError("--events-per-month requires a single replica");
  }

  const auto result = replicate(params, args.replicas, common.jobs);

  Table trace({"checkpoint_step", "size", "count"});
  trace.add_comment("p0=" + format_number(args.p0));
  trace.add_comment("alpha=" + format_number(args.alpha));
  trace.add_comment("steps=" + format_number(args.steps));
  trace.add_comment("replicas=" + format_number(args.replicas));
  trace.add_comment("seed=" + format_number(args.seed));
  trace.add_comment("generator=" + std::string(Rng::kGeneratorId));
  trace.add_comment(args.replicas > 1 ? "count=mean over replicas" : "count=projects of this size");
  for (const auto& cp : result.averaged) {
    for (const auto& [x, n] : cp.mean_counts) trace.add(cp.step, x, n);
  }
  s.write("trace.csv", trace);

  Table projects({"checkpoint_step", "replica", "n_projects"});
  for (std::size_t r = 0; r < result.replicas.size(); ++r) {
    for (const auto& cp : result.replicas[r].checkpoints) projects.add(cp.step, r, cp.n_projects);
  }
  s.write("projects.csv", projects);

  if (args.replicas > 1) {
    Table reps({"replica", "checkpoint_step", "size", "count"});
    for (std::size_t r = 0; r < result.replicas.size(); ++r) {
      for (const auto& cp : result.replicas[r].checkpoints) {
        for (const auto& [x, n] : cp.distribution.counts()) reps.add(r, cp.step, x, n);
      }
    }
    s.write("replicas.csv", reps);
  }

  if (args.events_per_month > 0) {
    const EventLog log = to_event_log(result.replicas.front(), args.events_per_month);
    Table events({"developer_id", "project_id", "entry_month", "exit_month"});
    for (const auto& e : log.events()) {
      events.add(log.developer_name(e.developer), log.project_name(e.project), e.entry, "");
    }
    s.write("events.csv", events);
  }
  return kExitOk;
}

int cmd_analyze(const Common& common, const AnalyzeArgs& args) {
  Session s(common, "analyze");
  s.input("events", args.events);
  s.input("mask", args.mask);
  const EventLog log = load_events(args.events);
  const MonthMask mask = load_mask(args.mask);
  const auto range = range_arg(args.months, {log.first_month(), log.last_month()});
  s.manifest.set("months", range_text(range));
  s.manifest.set("window_months", args.window_months);
  s.manifest.set("min_per_bin", args.min_per_bin);
  s.manifest.set("duplicates_dropped", log.duplicates_dropped());
  if (log.duplicates_dropped() > 0) {
    std::cerr << log.duplicates_dropped() << " duplicate event(s) dropped\n";
  }

  Table summary({"month", "n_developers", "n_projects", "n_links", "masked"});
  Table sizes({"month", "size", "count"});
  Table degrees({"month", "degree", "count"});
  std::vector<SnapshotSummary> summaries;
  for (Month m = range.first; m <= range.second; ++m) {
    const auto snap = snapshot_at(log, m);
    const auto sum = summarize(snap);
    summaries.push_back(sum);
    summary.add(m, sum.n_developers, sum.n_projects, sum.n_links, mask.is_masked(m));
    const auto size_dist = project_size_distribution(snap);
    const auto degree_dist = developer_degree_distribution(snap);
    for (const auto& [x, n] : size_dist.counts()) sizes.add(m, x, n);
    for (const auto& [k, n] : degree_dist.counts()) degrees.add(m, k, n);
  }
  s.write("summary.csv", summary);
  s.write("size_distribution.csv", sizes);
  s.write("degree_distribution.csv", degrees);

  Table entry_exit({"month", "new_projects", "removed_projects", "new_developers", "removed_developers", "masked"});
  for (const auto& c : entry_exit_counts(log, range.first, range.second)) {
    entry_exit.add(c.month, c.new_projects, c.removed_projects, c.new_developers, c.removed_developers,
                   mask.is_masked(c.month));
  }
  s.write("entry_exit.csv", entry_exit);

  const auto rates = relative_entry_rates(summaries, mask);
  Table rate_rows({"series", "month", "g"});
  Table rate_summary({"series", "median", "q10", "q90", "n_months"});
  for (const auto& [name, series] : {std::pair{"projects", &rates.projects}, std::pair{"developers", &rates.developers}}) {
    for (const auto& p : series->g) rate_rows.add(name, p.month, p.value);
    rate_summary.add(name, series->median, series->q10, series->q90, series->g.size());
  }
  s.write("relative_rates.csv", rate_rows);
  s.write("relative_rates_summary.csv", rate_summary);

  Table growth({"series", "omega", "intercept", "std_error", "r_squared", "p_value", "n_points", "status"});
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  for (const char* name : {"developers", "projects", "links"}) {
    std::vector<TimePoint> pts;
    for (const auto& sm : summaries) {
      const std::string n = name;
      const double v = n == "developers" ? static_cast<double>(sm.n_developers)
                       : n == "projects" ? static_cast<double>(sm.n_projects)
                                         : static_cast<double>(sm.n_links);
      pts.push_back({sm.month, v});
    }
    try {
      const auto f = fit_exponential_growth(pts, mask);
      growth.add(name, f.omega, f.intercept, f.std_error, f.r_squared, f.p_value, f.n_points, "ok");
    } catch (const DomainError&) {
      growth.add(name, nan, nan, nan, nan, nan, 0, "nonpositive_value");
    } catch (const DegenerateInputError&) {
      growth.add(name, nan, nan, nan, nan, nan, 0, "too_few_points");
    }
  }
  s.write("growth.csv", growth);

  Table gamma({"window_start", "window_months", "gamma", "intercept", "std_error", "weighted", "n_bins",
               "n_projects"});
  Table gamma_bins({"window_start", "min_size", "max_size", "n_projects", "mean_size", "mean_increment",
                    "log_increment_se"});
  try {
    GammaOptions gopts;
    gopts.window_months = args.window_months;
    gopts.min_per_bin = args.min_per_bin;
    for (const auto& f : size_dependent_growth(log, gopts)) {
      gamma.add(f.window_start, f.window_months, f.gamma, f.intercept, f.std_error, f.weighted, f.bins.size(),
                f.n_projects);
      for (const auto& b : f.bins) {
        gamma_bins.add(f.window_start, b.min_size, b.max_size, b.n_projects, b.mean_size, b.mean_increment,
                       b.log_increment_se);
      }
    }
    s.manifest.set("gamma_status", "ok");
  } catch (const DegenerateInputError& e) {
    s.manifest.set("gamma_status", e.what());
  }
  s.write("gamma.csv", gamma);
  s.write("gamma_bins.csv", gamma_bins);
  return kExitOk;
}

int cmd_fit(const Common& common, const FitArgs& args) {
  Session s(common, "fit");
  s.manifest.set("min_size", args.min_size);
  const auto inputs = load_distributions(s, args.in);
  FitOptions opts;
  opts.min_size = args.min_size;
  Table table({"month", "rho_hat", "log_likelihood", "n_observations", "derived_p0", "domain_flag", "iterations"});
  std::string skipped;
  int status = kExitOk;
  for (const auto& in : inputs) {
    try {
      const auto f = mle_rho(in.dist, opts);
      table.add(month_cell(in.month), f.rho_hat, f.log_likelihood, f.n_observations, f.derived_p0, f.domain_flag,
                f.iterations);
    } catch (const DegenerateInputError& e) {
      if (inputs.size() == 1) throw;
      note_skip(s, skipped, in.month, e);
    } catch (const ConvergenceError& e) {
      std::cerr << "month " << month_cell(in.month) << ": " << e.what() << " (best rho " << e.best_point() << ")\n";
      s.set_status("nonconvergence");
      status = kExitNonConvergence;
      break;
    }
  }
  s.write("fit.csv", table);
  return status;
}

int cmd_gof(const Common& common, const GofArgs& args) {
  Session s(common, "gof");
  s.manifest.set("bootstrap", args.bootstrap);
  s.manifest.set("seed", args.seed);
  s.manifest.set("ecdf_convention", GofResult::kEcdfConvention);
  s.manifest.set("p_value_convention", GofResult::kPValueConvention);
  const auto inputs = load_distributions(s, args.in);
  GofOptions opts;
  opts.n_bootstrap = args.bootstrap;
  opts.seed = args.seed;
  opts.jobs = common.jobs;
  if (args.bootstrap < 100) throw DomainError("--bootstrap must be at least 100");
  Table table({"month", "rho_hat", "ks", "p_value", "B", "seed"});
  std::string skipped;
  std::size_t failed = 0;
  int status = kExitOk;
  for (const auto& in : inputs) {
    try {
      const auto r = bootstrap_pvalue(in.dist, opts);
      failed += r.failed_replicas;
      table.add(month_cell(in.month), r.rho_hat, r.ks_observed, r.p_value, r.n_bootstrap, r.seed);
    } catch (const DegenerateInputError& e) {
      if (inputs.size() == 1) throw;
      note_skip(s, skipped, in.month, e);
    } catch (const ConvergenceError& e) {
      std::cerr << "month " << month_cell(in.month) << ": " << e.what() << "\n";
      s.set_status("nonconvergence");
      status = kExitNonConvergence;
      break;
    }
  }
  s.manifest.set("failed_replicas", failed);
  s.write("gof.csv", table);
  return status;
}

int cmd_em(const Common& common, const EmArgs& args) {
  Session s(common, "em");
  EMConfig cfg;
  cfg.epsilon = args.epsilon;
  cfg.max_iterations = args.max_iterations;
  if (args.start == "full") {
    cfg.start = EmStart::FullDataFit;
  } else if (args.start == "truncated") {
    cfg.start = EmStart::TruncatedFit;
  } else {
    throw DomainError("--start must be full or truncated");
  }
  cfg.rho_init = args.rho_init;
  cfg.validate();
  s.manifest.set("epsilon", args.epsilon);
  s.manifest.set("max_iterations", args.max_iterations);
  s.manifest.set("start", args.start);
  s.manifest.set("rho_init", args.rho_init ? format_number(*args.rho_init) : std::string());
  const auto inputs = load_distributions(s, args.in);

  Table table({"month", "rho_col", "observed_singletons", "latent_singletons", "iterations", "converged"});
  Table trace({"month", "iteration", "rho"});
  std::vector<MonthlyEM> series;
  std::string skipped;
  int status = kExitOk;
  for (const auto& in : inputs) {
    EMResult r;
    try {
      r = em_fit(in.dist, cfg);
    } catch (const DegenerateInputError& e) {
      if (inputs.size() == 1) throw;
      note_skip(s, skipped, in.month, e);
      continue;
    } catch (const ConvergenceError& e) {
      std::cerr << "month " << month_cell(in.month) << ": " << e.what() << "\n";
      status = kExitNonConvergence;
      break;
    }
    table.add(month_cell(in.month), r.rho_col, r.observed_singletons, r.latent_singletons, r.iterations, r.converged);
    for (std::size_t i = 0; i < r.rho_trace.size(); ++i) trace.add(month_cell(in.month), i, r.rho_trace[i]);
    if (!r.converged) status = kExitNonConvergence;
    if (in.month) series.push_back({*in.month, std::move(r)});
  }
  s.write("em.csv", table);
  s.write("em_trace.csv", trace);

  if (series.size() >= 2 && status == kExitOk) {
    // New developers per month for the implied-p0 column.
    const EventLog log = load_events(args.in.input);
    const Month first = series.front().month;
    const Month last = series.back().month;
    const auto entries = founding_entries(log, first, last, P0Variant::All);
    std::vector<MonthlyCount> devs;
    for (const auto& m : series) devs.push_back({m.month, entries[m.month - first].new_developers});
    Table pred({"month", "predicted_new_collaborative", "new_developers", "implied_p0"});
    for (const auto& e : predicted_collaborative_entries(series, devs)) {
      pred.add(e.month, e.predicted_new_collaborative, e.new_developers, e.implied_p0);
    }
    s.write("collaborative_entries.csv", pred);
  }
  if (status != kExitOk) {
    s.set_status("nonconvergence");
    std::cerr << "EM did not converge for at least one input\n";
  }
  return status;
}

int cmd_p0(const Common& common, const P0Args& args) {
  Session s(common, "p0");
  s.input("events", args.events);
  s.input("mask", args.mask);
  P0Variant variant;
  if (args.variant == "all") {
    variant = P0Variant::All;
  } else if (args.variant == "collaborative") {
    variant = P0Variant::Collaborative;
  } else {
    throw DomainError("--variant must be all or collaborative");
  }
  if (!(args.horizon_days > 0.0)) throw DomainError("--horizon-days must be positive");
  const EventLog log = load_events(args.events);
  const MonthMask mask = load_mask(args.mask);
  const auto range = range_arg(args.months, {log.first_month(), log.last_month()});
  const Month obs_end = args.observation_end.empty() ? log.last_month()
                                                     : month_arg(args.observation_end, "--observation-end");
  CensorOptions copts;
  copts.horizon_days = args.horizon_days;
  s.manifest.set("variant", args.variant);
  s.manifest.set("months", range_text(range));
  s.manifest.set("observation_end", obs_end);
  s.manifest.set("horizon_days", args.horizon_days);
  s.manifest.set("days_per_month", copts.days_per_month);

  const auto labels = classify_collaborative(log, obs_end, copts);
  const auto entries = founding_entries(log, range.first, range.second, variant, labels);
  const auto series = p0_series(entries, variant, mask);

  Table points({"month", "g1", "gtot", "p0", "above_one"});
  for (const auto& p : series.points) points.add(p.month, p.g1, p.gtot, p.p0, p.above_one);
  s.write("p0_series.csv", points);
  Table summary({"variant", "median", "n_months", "n_above_one"});
  summary.add(args.variant, series.median, series.points.size(), series.n_above_one);
  s.write("p0_summary.csv", summary);

  if (variant == P0Variant::Collaborative) {
    Table lt({"project_id", "founded", "second_developer", "collaborative", "censored"});
    for (const auto& l : labels) {
      lt.add(log.project_name(l.project), l.founded,
             l.second_developer ? std::to_string(*l.second_developer) : std::string(), l.collaborative, l.censored);
    }
    s.write("labels.csv", lt);
  }

  if (!args.cohort.empty()) {
    const auto cohort = range_arg(args.cohort, {});
    s.manifest.set("cohort", range_text(cohort));
    s.manifest.set("min_cohort", args.min_cohort);
    const auto waits = cohort_waits(labels, cohort.first, cohort.second, obs_end, copts);
    const auto f = interarrival_fit(waits, args.min_cohort);
    Table ia({"cohort_first", "cohort_last", "lambda", "mean_days", "prob_before_mean", "censor_factor",
              "n_uncensored", "n_censored", "exponential_plausible"});
    ia.add(cohort.first, cohort.second, f.lambda, f.mean_days, f.prob_before_mean, f.censor_factor, f.n_uncensored,
           f.n_censored, f.exponential_plausible);
    s.write("interarrival.csv", ia);
  }
  return kExitOk;
}

int cmd_rateeq(const Common& common, const RateEqArgs& args) {
  Session s(common, "rateeq");
  s.manifest.set("p0", args.p0);
  s.manifest.set("steps", args.steps);
  s.manifest.set("x_trunc", args.x_trunc);
  s.manifest.set("x_max", args.x_max);
  rho_from_p0(args.p0);  // domain check
  if (args.steps < 1) throw DomainError("--steps must be at least 1");
  if (args.x_trunc < 1 || args.x_max < 1) throw DomainError("--x-trunc and --x-max must be positive");
  std::vector<std::uint64_t> record = args.record;
  if (record.empty()) record.push_back(args.steps);
  for (auto r : record) {
    if (r < 1 || r > args.steps) throw DomainError("--record steps must lie in [1, steps]");
  }
  std::string rec;
  for (auto r : record) rec += (rec.empty() ? "" : ";") + std::to_string(r);
  s.manifest.set("record", rec);

  MasterOptions opts;
  opts.x_trunc = args.x_trunc;
  const auto states = iterate_master(args.p0, args.steps, record, opts);
  const std::uint64_t x_out = std::min(args.x_max, args.x_trunc);
  Table master({"N", "x", "n"});
  Table mass({"N", "total_mass", "total_projects", "overflow_projects", "overflow_mass"});
  Table steady({"N", "x", "n_star"});
  for (const auto& st : states) {
    for (std::uint64_t x = 1; x <= x_out; ++x) master.add(st.N, x, st.count(x));
    mass.add(st.N, st.total_mass(), st.total_projects(), st.overflow_projects, st.overflow_mass);
    const auto star = steady_state(args.p0, st.N, x_out);
    for (std::uint64_t x = 1; x <= x_out; ++x) steady.add(st.N, x, star[x - 1]);
  }
  s.write("master.csv", master);
  s.write("mass.csv", mass);
  s.write("steady_state.csv", steady);
  return kExitOk;
}

}  // namespace simon::cli
