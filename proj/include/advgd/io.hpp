#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Text serialization helpers shared by the CSV/summary/plot writers. Numbers
// are formatted with to_chars at 17 significant digits so identical doubles
// always produce identical bytes, and files are written atomically
// (tmp + rename) so readers never observe a half-written result.

namespace advgd::io {

inline std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::runtime_error("parse_double: not a number: '" + std::string(text) + "'");
  return value;
}

/// Writes content to path via a sibling temp file and an atomic rename.
/// Parent directories are created on demand.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

/// Parses a header + all-numeric-rows CSV as written by the run command.
/// Throws runtime_error on ragged rows or non-numeric cells.
inline CsvTable parse_csv(std::string_view content) {
  CsvTable table;
  std::size_t pos = 0;
  bool first = true;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (first) {
      for (auto f : fields) table.header.emplace_back(f);
      first = false;
      continue;
    }
    if (fields.size() != table.header.size())
      throw std::runtime_error("csv: row has " + std::to_string(fields.size()) +
                               " fields, header has " + std::to_string(table.header.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields)  // empty cells (bounds of an inadmissible run) read as NaN
      row.push_back(f.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(f));
    table.rows.push_back(std::move(row));
  }
  if (first) throw std::runtime_error("csv: empty file");
  return table;
}

}  // namespace advgd::io
