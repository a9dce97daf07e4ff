#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sosiq/error.hpp"

namespace sosiq {

// Minimal CSV: plain comma-separated fields, no quoting (none of the file
// formats here put commas inside fields), '\n' record separator.

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

// Whole-file read as header + rows. Skips blank trailing lines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file: " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("empty CSV file (missing header): " + path);
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    t.rows.push_back(split_csv_line(line));
  }
  return t;
}

// Shortest-exact double formatting for CSV/model files: 17 significant
// digits round-trips any double bit-exactly through strtod.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, const std::string& context) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("cannot parse real value '" + s + "' in " + context);
  return v;
}

inline long parse_long(const std::string& s, const std::string& context) {
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("cannot parse integer '" + s + "' in " + context);
  return v;
}

}  // namespace sosiq
