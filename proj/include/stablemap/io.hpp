#pragma once

// Versioned CSV tables. The first line is a comment naming the schema
// version and the table kind; numbers are written with 17 significant digits
// so a read-back reproduces every double bit for bit.
//
//   # stablemap-csv v1 kind=stable
//   realisation,value
//   0,0.71649327311281977

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablemap::io {

inline constexpr int csv_version = 1;

class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class schema_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CsvTable {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw schema_error("column '" + name + "' not found in " + kind + " table");
  }

  std::vector<double> column(const std::string& name) const {
    const std::size_t k = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
  }
};

class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::string& kind, const std::vector<std::string>& columns)
      : out_(path), path_(path), width_(columns.size()) {
    if (!out_) throw io_error("cannot open '" + path + "' for writing");
    out_ << "# stablemap-csv v" << csv_version << " kind=" << kind << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw schema_error("row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw io_error("failed writing '" + path_ + "'");
  }

private:
  std::ofstream out_;
  std::string path_;
  std::size_t width_;
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw schema_error("'" + path + "' is empty");
  const std::string prefix = "# stablemap-csv v";
  if (line.rfind(prefix, 0) != 0) throw schema_error("'" + path + "' lacks the stablemap-csv header");
  {
    std::istringstream head(line.substr(prefix.size()));
    int version = 0;
    std::string kind;
    head >> version >> kind;
    if (version != csv_version)
      throw schema_error("'" + path + "' has unsupported schema version " + std::to_string(version));
    if (kind.rfind("kind=", 0) == 0) table.kind = kind.substr(5);
  }
  if (!std::getline(in, line)) throw schema_error("'" + path + "' has no column header");
  {
    std::istringstream cols(line);
    std::string c;
    while (std::getline(cols, c, ',')) table.columns.push_back(c);
  }
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    row.reserve(table.columns.size());
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      double value = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || end != cell.data() + cell.size() || cell.empty())
        throw schema_error("'" + path + "' line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(value);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (row.size() != table.columns.size())
      throw schema_error("'" + path + "' line " + std::to_string(lineno) + ": expected " +
                         std::to_string(table.columns.size()) + " fields");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace stablemap::io
