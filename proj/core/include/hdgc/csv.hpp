#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hdgc {

/// Raw contents of an ingested CSV: one ISO-8601 date per row plus a numeric
/// matrix. Column selection and dataset assembly happen downstream.
struct CsvTable {
  std::vector<std::string> dates;
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;  // rows x column_names.size()

  Eigen::Index rows() const { return values.rows(); }
  int column_index(const std::string& name) const;  // -1 when absent
};

/// Reads a CSV with a header row, an ISO-8601 date in the first column, and
/// numeric values elsewhere. Rows must be strictly increasing in time.
/// Parse failures report the 1-based row and the column involved.
CsvTable load_csv(const std::string& path);

}  // namespace hdgc
