#pragma once

// Plain-text output: comma-separated tables with a header row and key=value
// run manifests. Numbers are printed with 12 significant digits so repeated
// runs on one platform give byte-identical files.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace simon {

std::string format_number(double value);
std::string format_number(std::uint64_t value);
std::string format_number(std::int64_t value);
inline std::string format_number(int value) { return format_number(static_cast<std::int64_t>(value)); }
inline std::string format_number(unsigned value) { return format_number(static_cast<std::uint64_t>(value)); }
inline std::string format_number(long long value) { return format_number(static_cast<std::int64_t>(value)); }
inline std::string format_number(unsigned long long value) {
  return format_number(static_cast<std::uint64_t>(value));
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  // Comment lines written before the header, each prefixed with "# ".
  void add_comment(std::string line) { comments_.push_back(std::move(line)); }

  template <typename... Cells>
  void add(const Cells&... cells) {
    add_row({cell(cells)...});
  }
  void add_row(std::vector<std::string> row);

  std::size_t size() const { return rows_.size(); }
  std::string str() const;
  // Throws IoError on failure.
  void write(const std::filesystem::path& path) const;

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <typename T>
  static std::string cell(const T& v) {
    return format_number(v);
  }

  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered key=value block.
class Manifest {
 public:
  void set(std::string key, std::string value);
  template <typename T>
  void set(std::string key, const T& value) {
    set(std::move(key), format_number(value));
  }
  void set(std::string key, const char* value) { set(std::move(key), std::string(value)); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace simon
