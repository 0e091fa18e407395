#include "hdgc/csv.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hdgc/errors.hpp"

namespace hdgc {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding whitespace; quoting is not supported.
    size_t begin = field.find_first_not_of(" \t\r");
    size_t end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? std::string()
                                                : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool looks_like_iso_date(const std::string& s) {
  // YYYY-MM-DD prefix; a time suffix is tolerated.
  if (s.size() < 10) return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!std::isdigit(static_cast<unsigned char>(s[static_cast<size_t>(i)]))) return false;
  }
  return s[4] == '-' && s[7] == '-';
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (size_t j = 0; j < column_names.size(); ++j) {
    if (column_names[j] == name) return static_cast<int>(j);
  }
  return -1;
}

CsvTable load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("'" + path + "' is empty");
  }
  std::vector<std::string> header = split_fields(line);
  if (header.size() < 2) {
    throw DataError("'" + path + "' header must have a date column plus at least one series");
  }

  CsvTable table;
  table.column_names.assign(header.begin() + 1, header.end());
  std::set<std::string> seen;
  for (const auto& name : table.column_names) {
    if (name.empty()) throw DataError("'" + path + "' has an empty column name in the header");
    if (!seen.insert(name).second) {
      throw DataError("'" + path + "' has a duplicate column name '" + name + "'");
    }
  }

  const size_t n_cols = table.column_names.size();
  std::vector<std::vector<double>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != n_cols + 1) {
      throw DataError(path + ": row " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(n_cols + 1));
    }
    if (!looks_like_iso_date(fields[0])) {
      throw DataError(path + ": row " + std::to_string(line_no) +
                      ", column 1: '" + fields[0] + "' is not an ISO-8601 date");
    }
    if (!table.dates.empty() && fields[0] <= table.dates.back()) {
      throw DataError(path + ": row " + std::to_string(line_no) +
                      ": dates must be strictly increasing ('" + fields[0] +
                      "' follows '" + table.dates.back() + "')");
    }
    std::vector<double> row(n_cols);
    for (size_t j = 0; j < n_cols; ++j) {
      const std::string& f = fields[j + 1];
      double value = 0.0;
      const char* first = f.data();
      const char* last = f.data() + f.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last || f.empty()) {
        throw DataError(path + ": row " + std::to_string(line_no) + ", column '" +
                        table.column_names[j] + "': cannot parse '" + f + "' as a number");
      }
      row[j] = value;
    }
    table.dates.push_back(fields[0]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw DataError("'" + path + "' has no data rows");
  }

  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < n_cols; ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

}  // namespace hdgc
