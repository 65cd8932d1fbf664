// Minimal CSV reading/writing. Handles quoted fields, embedded commas and
// quotes, CRLF endings, and the "value, value" spacing used by some public
// data dumps (fields are trimmed of surrounding blanks after parsing).
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flea/common.hpp"

namespace flea::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> parse_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// Reads a whole CSV file; the first line is the header. Ragged rows are a
// hard error since silent column drift would corrupt every downstream stage.
inline Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io", "cannot open CSV file: " + path);
  Table t;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && !first) continue;
    auto fields = parse_line(line);
    if (first) {
      t.header = fields;
      first = false;
    } else {
      if (fields.size() != t.header.size())
        fail("io", path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) fail("io", "empty CSV file: " + path);
  return t;
}

inline std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline void write_file(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) fail("io", "cannot write CSV file: " + path);
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out << ',';
    out << quote_if_needed(t.header[i]);
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << quote_if_needed(row[i]);
    }
    out << '\n';
  }
  if (!out) fail("io", "write failed: " + path);
}

}  // namespace flea::csv
