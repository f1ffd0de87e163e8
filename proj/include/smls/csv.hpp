#pragma once

// Minimal RFC-4180 CSV: quoting on write, quoted fields on read.

#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "smls/model.hpp"

namespace smls::csv {

inline constexpr const char* kSchema = "smls-csv-1";

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class Row {
 public:
  Row& operator<<(std::string_view s) { return add(escape(s)); }
  Row& operator<<(const std::string& s) { return add(escape(s)); }
  Row& operator<<(const char* s) { return add(escape(s)); }
  Row& operator<<(bool b) { return add(b ? "1" : "0"); }
  Row& operator<<(double v) { return add(format_double(v)); }
  template <typename T>
    requires std::is_integral_v<T>
  Row& operator<<(T v) { return add(std::to_string(v)); }

  const std::string& str() const { return line_; }

 private:
  Row& add(const std::string& s) {
    if (!first_) line_ += ',';
    first_ = false;
    line_ += s;
    return *this;
  }
  std::string line_;
  bool first_ = true;
};

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

/// A CSV file with a header row, addressed by column name.
class Table {
 public:
  static Table parse(std::string_view text) {
    Table t;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      const auto line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty() || line == "\r") continue;
      auto fields = split(line);
      if (header) {
        for (std::size_t i = 0; i < fields.size(); ++i) t.index_[fields[i]] = i;
        t.columns_ = std::move(fields);
        header = false;
      } else {
        t.rows_.push_back(std::move(fields));
      }
    }
    return t;
  }

  bool has(const std::string& column) const { return index_.count(column) > 0; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  const std::string& get(std::size_t row, const std::string& column) const {
    const auto it = index_.find(column);
    if (it == index_.end()) throw Error(ErrorKind::InvalidArgument, "missing column '" + column + "'");
    const auto& r = rows_.at(row);
    if (it->second >= r.size()) throw Error(ErrorKind::InvalidArgument, "short row " + std::to_string(row + 2));
    return r[it->second];
  }

  double number(std::size_t row, const std::string& column) const {
    const auto& s = get(row, column);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "column '" + column + "' row " + std::to_string(row + 2) +
                                                  ": not a number: '" + s + "'");
    }
  }

 private:
  std::vector<std::string> columns_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace smls::csv
