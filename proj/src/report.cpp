#include "simon/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace simon {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_number(std::uint64_t value) { return std::to_string(value); }
std::string format_number(std::int64_t value) { return std::to_string(value); }

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns_.size()) {
    throw std::logic_error("row has " + std::to_string(row.size()) + " cells, table has " +
                           std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

namespace {
void append_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}
}  // namespace

std::string Table::str() const {
  std::string out;
  for (const auto& c : comments_) out += "# " + c + "\n";
  append_line(out, columns_);
  for (const auto& r : rows_) append_line(out, r);
  return out;
}

void Table::write(const std::filesystem::path& path) const { write_text(path, str()); }

void Manifest::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

std::string Manifest::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

void Manifest::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace simon
