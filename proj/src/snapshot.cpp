#include "simon/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <utility>

#include "simon/errors.hpp"

namespace simon {

ParseError::ParseError(std::vector<RowError> errors)
    : std::runtime_error([&] {
        std::string msg = std::to_string(errors.size()) + " malformed row(s)";
        for (const auto& e : errors) {
          msg += "\n  line " + std::to_string(e.line) + ": " + e.message;
        }
        return msg;
      }()),
      errors_(std::move(errors)) {}

Histogram::Histogram(const std::map<std::uint64_t, std::uint64_t>& counts) {
  for (const auto& [value, count] : counts) add(value, count);
}

void Histogram::add(std::uint64_t value, std::uint64_t count) {
  if (value == 0) throw DomainError("histogram values must be positive integers");
  if (count == 0) return;
  counts_[value] += count;
  total_count_ += count;
  total_weight_ += value * count;
}

std::uint64_t Histogram::count(std::uint64_t value) const {
  auto it = counts_.find(value);
  return it == counts_.end() ? 0 : it->second;
}

double Histogram::frequency(std::uint64_t value) const {
  if (total_count_ == 0) return 0.0;
  return static_cast<double>(count(value)) / static_cast<double>(total_count_);
}

SizeDistribution SizeDistribution::from_values(std::span<const std::uint64_t> sizes) {
  SizeDistribution dist;
  for (auto s : sizes) dist.add(s);
  return dist;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

std::optional<long long> parse_int(std::string_view s) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

std::optional<Month> parse_month(std::string_view field, const ParseOptions& options) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  auto dash = field.find('-', 1);
  if (dash == std::string_view::npos) {
    auto v = parse_int(field);
    if (!v || *v < std::numeric_limits<Month>::min() || *v > std::numeric_limits<Month>::max()) {
      return std::nullopt;
    }
    return static_cast<Month>(*v);
  }
  auto year = parse_int(field.substr(0, dash));
  auto month = parse_int(field.substr(dash + 1));
  if (!year || !month || *month < 1 || *month > 12 || dash != 4) return std::nullopt;
  return static_cast<Month>((*year - options.epoch_year) * 12 + (*month - options.epoch_month));
}

EntityId EventLogBuilder::intern(std::unordered_map<std::string, EntityId>& index,
                                 std::vector<std::string>& names, std::string_view name) {
  auto [it, inserted] = index.try_emplace(std::string(name), static_cast<EntityId>(names.size()));
  if (inserted) names.emplace_back(name);
  return it->second;
}

bool EventLogBuilder::add(std::string_view developer, std::string_view project, Month entry,
                          std::optional<Month> exit) {
  if (exit && *exit < entry) {
    throw DomainError("exit month " + std::to_string(*exit) + " precedes entry month " +
                      std::to_string(entry));
  }
  const EntityId d = intern(developer_index_, developers_, developer);
  const EntityId p = intern(project_index_, projects_, project);
  if (!seen_.emplace(d, p, entry).second) {
    ++duplicates_;
    return false;
  }
  events_.push_back({d, p, entry, exit});
  return true;
}

EventLog EventLogBuilder::build() && {
  EventLog log;
  log.developers_ = std::move(developers_);
  log.projects_ = std::move(projects_);
  log.events_ = std::move(events_);
  log.duplicates_dropped_ = duplicates_;
  if (!log.events_.empty()) {
    Month lo = std::numeric_limits<Month>::max();
    Month hi = std::numeric_limits<Month>::min();
    for (const auto& e : log.events_) {
      lo = std::min(lo, e.entry);
      hi = std::max(hi, e.exit.value_or(e.entry));
    }
    log.first_month_ = lo;
    log.last_month_ = hi;
  }
  return log;
}

EventLog parse_events(std::istream& in, const ParseOptions& options) {
  EventLogBuilder builder;
  std::vector<RowError> errors;
  std::vector<std::size_t> duplicate_lines;
  std::string line;
  std::size_t line_no = 0;
  bool first_data_row = true;

  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = split(text, options.delimiter);
    const bool was_first = std::exchange(first_data_row, false);

    if (fields.size() < 3 || fields.size() > 4) {
      if (was_first && fields.size() >= 3) continue;
      errors.push_back({line_no, "expected 3 or 4 fields, found " + std::to_string(fields.size())});
      continue;
    }
    auto entry = parse_month(fields[2], options);
    if (!entry) {
      if (was_first) continue;  // header row
      errors.push_back({line_no, "unparseable entry month '" + std::string(fields[2]) + "'"});
      continue;
    }
    if (fields[0].empty() || fields[1].empty()) {
      errors.push_back({line_no, "empty developer or project identifier"});
      continue;
    }
    std::optional<Month> exit;
    if (fields.size() == 4 && !fields[3].empty()) {
      exit = parse_month(fields[3], options);
      if (!exit) {
        errors.push_back({line_no, "unparseable exit month '" + std::string(fields[3]) + "'"});
        continue;
      }
      if (*exit < *entry) {
        errors.push_back({line_no, "exit month " + std::to_string(*exit) +
                                       " precedes entry month " + std::to_string(*entry)});
        continue;
      }
    }
    if (!builder.add(fields[0], fields[1], *entry, exit)) duplicate_lines.push_back(line_no);
  }
  if (!errors.empty()) throw ParseError(std::move(errors));
  EventLog log = std::move(builder).build();
  log.duplicate_lines_ = std::move(duplicate_lines);
  return log;
}

MonthMask parse_mask(std::istream& in, const ParseOptions& options) {
  MonthMask mask;
  std::vector<RowError> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto m = parse_month(text, options);
    if (!m) {
      errors.push_back({line_no, "unparseable month '" + std::string(text) + "'"});
      continue;
    }
    mask.mask(*m);
  }
  if (!errors.empty()) throw ParseError(std::move(errors));
  return mask;
}

Snapshot snapshot_at(const EventLog& log, Month month) {
  if (log.empty() || month < log.first_month() || month > log.last_month()) {
    throw RangeError("month " + std::to_string(month) + " outside observed range [" +
                     std::to_string(log.first_month()) + ", " + std::to_string(log.last_month()) +
                     "]");
  }
  Snapshot snap;
  snap.month = month;
  for (const auto& e : log.events()) {
    if (e.active_at(month)) snap.links.push_back({e.developer, e.project});
  }
  std::sort(snap.links.begin(), snap.links.end());
  snap.links.erase(std::unique(snap.links.begin(), snap.links.end()), snap.links.end());
  return snap;
}

namespace {

// Number of links per developer (first) and per project (second).
std::pair<std::map<EntityId, std::uint64_t>, std::map<EntityId, std::uint64_t>> degrees(
    const Snapshot& s) {
  std::map<EntityId, std::uint64_t> dev, proj;
  for (const auto& l : s.links) {
    ++dev[l.developer];
    ++proj[l.project];
  }
  return {std::move(dev), std::move(proj)};
}

// Accumulates pair weights among members of each group. `groups` maps a
// group key to its (sorted, unique) member list.
std::vector<WeightedEdge> co_membership(const std::map<EntityId, std::vector<EntityId>>& groups) {
  std::map<std::pair<EntityId, EntityId>, std::uint64_t> weights;
  for (const auto& [key, members] : groups) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        ++weights[{members[i], members[j]}];
      }
    }
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(weights.size());
  for (const auto& [pair, w] : weights) edges.push_back({pair.first, pair.second, w});
  return edges;
}

}  // namespace

SnapshotSummary summarize(const Snapshot& s) {
  auto [dev, proj] = degrees(s);
  return {s.month, dev.size(), proj.size(), s.links.size()};
}

SizeDistribution project_size_distribution(const Snapshot& s) {
  SizeDistribution dist;
  for (const auto& [p, size] : degrees(s).second) dist.add(size);
  return dist;
}

DegreeDistribution developer_degree_distribution(const Snapshot& s) {
  DegreeDistribution dist;
  for (const auto& [d, k] : degrees(s).first) dist.add(k);
  return dist;
}

std::vector<WeightedEdge> project_projection(const Snapshot& s) {
  std::map<EntityId, std::vector<EntityId>> by_developer;
  // links are sorted by (developer, project) so member lists come out sorted
  for (const auto& l : s.links) by_developer[l.developer].push_back(l.project);
  return co_membership(by_developer);
}

std::vector<WeightedEdge> developer_projection(const Snapshot& s) {
  std::map<EntityId, std::vector<EntityId>> by_project;
  for (const auto& l : s.links) by_project[l.project].push_back(l.developer);
  return co_membership(by_project);
}

namespace {

using Interval = std::pair<Month, std::optional<Month>>;

// Merges [entry, exit) intervals per entity; touching intervals are merged so
// continuous activity is not split into exit + re-entry.
std::vector<Interval> merge_intervals(std::vector<Interval> iv) {
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) {
    return a.first < b.first;
  });
  std::vector<Interval> merged;
  for (const auto& cur : iv) {
    if (!merged.empty()) {
      auto& last = merged.back();
      if (!last.second || cur.first <= *last.second) {
        if (last.second && (!cur.second || *cur.second > *last.second)) last.second = cur.second;
        continue;
      }
    }
    merged.push_back(cur);
  }
  return merged;
}

}  // namespace

std::vector<EntryExitCounts> entry_exit_counts(const EventLog& log, Month first, Month last) {
  if (last < first) throw DomainError("entry_exit_counts requires a nonempty month range");
  std::vector<EntryExitCounts> rows(static_cast<std::size_t>(last - first) + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].month = first + static_cast<Month>(i);

  std::vector<std::vector<Interval>> dev_iv(log.n_developers()), proj_iv(log.n_projects());
  for (const auto& e : log.events()) {
    if (e.exit && *e.exit == e.entry) continue;  // never active
    dev_iv[e.developer].emplace_back(e.entry, e.exit);
    proj_iv[e.project].emplace_back(e.entry, e.exit);
  }
  auto tally = [&](std::vector<std::vector<Interval>>& per_entity, auto entered, auto removed) {
    for (auto& iv : per_entity) {
      for (const auto& [a, b] : merge_intervals(std::move(iv))) {
        if (a >= first && a <= last) ++(rows[a - first].*entered);
        if (b && *b >= first && *b <= last) ++(rows[*b - first].*removed);
      }
    }
  };
  tally(proj_iv, &EntryExitCounts::new_projects, &EntryExitCounts::removed_projects);
  tally(dev_iv, &EntryExitCounts::new_developers, &EntryExitCounts::removed_developers);
  return rows;
}

}  // namespace simon
