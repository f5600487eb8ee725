#pragma once

// Bipartite developer/project membership data: event logs, monthly
// snapshots, size and degree distributions, one-mode projections and
// entry/exit bookkeeping.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace simon {

// Month index: integer months since a configurable epoch.
using Month = std::int32_t;
// Dense interned identifier of a developer or project within one EventLog.
using EntityId = std::uint32_t;

struct MembershipEvent {
  EntityId developer = 0;
  EntityId project = 0;
  Month entry = 0;
  std::optional<Month> exit;  // first month in which the link is inactive

  bool active_at(Month t) const { return entry <= t && (!exit || *exit > t); }
};

// Histogram over positive integers: counts[x] = number of items of value x.
// Zero counts are never stored.
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(const std::map<std::uint64_t, std::uint64_t>& counts);

  void add(std::uint64_t value, std::uint64_t count = 1);

  const std::map<std::uint64_t, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t count(std::uint64_t value) const;
  // Σ n(x)
  std::uint64_t total_count() const { return total_count_; }
  // Σ x·n(x)
  std::uint64_t total_weight() const { return total_weight_; }
  std::uint64_t max_value() const { return counts_.empty() ? 0 : counts_.rbegin()->first; }
  bool empty() const { return counts_.empty(); }
  double frequency(std::uint64_t value) const;

  bool operator==(const Histogram&) const = default;

 private:
  std::map<std::uint64_t, std::uint64_t> counts_;
  std::uint64_t total_count_ = 0;
  std::uint64_t total_weight_ = 0;
};

// n(x): number of projects with exactly x developers.
class SizeDistribution : public Histogram {
 public:
  using Histogram::Histogram;
  static SizeDistribution from_values(std::span<const std::uint64_t> sizes);

  std::uint64_t total_projects() const { return total_count(); }
  std::uint64_t total_developers() const { return total_weight(); }
  std::uint64_t max_size() const { return max_value(); }
};

// Number of developers with degree k (number of projects joined).
class DegreeDistribution : public Histogram {
 public:
  using Histogram::Histogram;

  std::uint64_t total_developers() const { return total_count(); }
  std::uint64_t total_links() const { return total_weight(); }
};

struct ParseOptions {
  char delimiter = ',';
  // Calendar months "YYYY-MM" are converted to indices relative to this epoch.
  int epoch_year = 2000;
  int epoch_month = 1;
};

// Parses either an integer month index or "YYYY-MM". Returns nullopt when the
// field is neither.
std::optional<Month> parse_month(std::string_view field, const ParseOptions& options = {});

class EventLog;

// Accumulates events, interning identifiers and dropping duplicate
// (developer, project, entry) triples.
class EventLogBuilder {
 public:
  // Returns false (and records the duplicate) if the triple was already added.
  // Throws DomainError if exit < entry.
  bool add(std::string_view developer, std::string_view project, Month entry,
           std::optional<Month> exit = std::nullopt);
  EventLog build() &&;

 private:
  EntityId intern(std::unordered_map<std::string, EntityId>& index,
                  std::vector<std::string>& names, std::string_view name);

  std::unordered_map<std::string, EntityId> developer_index_;
  std::unordered_map<std::string, EntityId> project_index_;
  std::vector<std::string> developers_;
  std::vector<std::string> projects_;
  std::vector<MembershipEvent> events_;
  std::set<std::tuple<EntityId, EntityId, Month>> seen_;
  std::size_t duplicates_ = 0;
};

class EventLog {
 public:
  EventLog() = default;

  std::span<const MembershipEvent> events() const { return events_; }
  std::size_t n_developers() const { return developers_.size(); }
  std::size_t n_projects() const { return projects_.size(); }
  const std::string& developer_name(EntityId id) const { return developers_.at(id); }
  const std::string& project_name(EntityId id) const { return projects_.at(id); }
  std::size_t duplicates_dropped() const { return duplicates_dropped_; }
  // Line numbers of dropped duplicate rows when the log came from parse_events.
  const std::vector<std::size_t>& duplicate_lines() const { return duplicate_lines_; }

  bool empty() const { return events_.empty(); }
  // Observed range [first_month, last_month]: earliest entry to the latest
  // entry or exit month.
  Month first_month() const { return first_month_; }
  Month last_month() const { return last_month_; }

 private:
  friend class EventLogBuilder;
  friend EventLog parse_events(std::istream&, const ParseOptions&);

  std::vector<std::string> developers_;
  std::vector<std::string> projects_;
  std::vector<MembershipEvent> events_;
  std::size_t duplicates_dropped_ = 0;
  std::vector<std::size_t> duplicate_lines_;
  Month first_month_ = 0;
  Month last_month_ = 0;
};

// Reads `developer_id,project_id,entry_month,exit_month` rows. A header row is
// detected when the first data row's month field does not parse. Blank lines
// and lines starting with '#' are skipped. Throws ParseError listing every
// malformed row; duplicate triples are dropped and counted.
EventLog parse_events(std::istream& in, const ParseOptions& options = {});

struct Link {
  EntityId developer = 0;
  EntityId project = 0;
  auto operator<=>(const Link&) const = default;
};

struct Snapshot {
  Month month = 0;
  std::vector<Link> links;  // sorted, unique active pairs
};

struct SnapshotSummary {
  Month month = 0;
  std::uint64_t n_developers = 0;
  std::uint64_t n_projects = 0;
  std::uint64_t n_links = 0;
  bool operator==(const SnapshotSummary&) const = default;
};

// Active pairs at `month`. Throws RangeError outside the log's observed range.
Snapshot snapshot_at(const EventLog& log, Month month);
SnapshotSummary summarize(const Snapshot& snapshot);
SizeDistribution project_size_distribution(const Snapshot& snapshot);
DegreeDistribution developer_degree_distribution(const Snapshot& snapshot);

// Undirected weighted edge with a < b.
struct WeightedEdge {
  EntityId a = 0;
  EntityId b = 0;
  std::uint64_t weight = 0;
  bool operator==(const WeightedEdge&) const = default;
};

// Projects linked by shared developers; weight = number of shared developers.
std::vector<WeightedEdge> project_projection(const Snapshot& snapshot);
// Developers linked by shared projects; weight = number of shared projects.
std::vector<WeightedEdge> developer_projection(const Snapshot& snapshot);

struct EntryExitCounts {
  Month month = 0;
  std::uint64_t new_projects = 0;
  std::uint64_t removed_projects = 0;
  std::uint64_t new_developers = 0;
  std::uint64_t removed_developers = 0;
  bool operator==(const EntryExitCounts&) const = default;
};

// Per-month entries and removals over [first, last]. An entity enters in the
// month it goes from no active links to at least one, and is removed in the
// first month it has no active links after having been active.
std::vector<EntryExitCounts> entry_exit_counts(const EventLog& log, Month first, Month last);

// Months excluded from estimation (data disruptions).
class MonthMask {
 public:
  MonthMask() = default;
  explicit MonthMask(std::set<Month> masked) : masked_(std::move(masked)) {}
  bool is_masked(Month m) const { return masked_.count(m) != 0; }
  void mask(Month m) { masked_.insert(m); }
  const std::set<Month>& months() const { return masked_; }

 private:
  std::set<Month> masked_;
};

// One month per line (index or YYYY-MM); '#' comments and blank lines ignored.
MonthMask parse_mask(std::istream& in, const ParseOptions& options = {});

}  // namespace simon
