#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hdgc {

/// Regression inputs for one time series problem. Rows are time-ordered,
/// oldest first; `y` and the rows of `X` are aligned.
///
/// Values are immutable by convention after construction: every operation in
/// this library takes datasets by const reference and returns new values, so
/// instances are safe to share across threads.
struct TimeSeriesDataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> column_names;

  Eigen::Index T() const { return y.size(); }
  Eigen::Index p() const { return X.cols(); }

  /// Validating constructor: checks shapes, finiteness, and name uniqueness.
  static TimeSeriesDataset create(Eigen::VectorXd y, Eigen::MatrixXd X,
                                  std::vector<std::string> column_names);
};

/// Throws DataError/DimensionError if the dataset violates its invariants.
void validate_dataset(const TimeSeriesDataset& data);

/// Named partition of the column indices {0..p-1}. Group order is
/// meaningful (it fixes the order of block updates and of reports).
struct GroupStructure {
  std::vector<std::pair<std::string, std::vector<int>>> groups;

  int n_groups() const { return static_cast<int>(groups.size()); }

  /// Verifies the index sets form a partition of {0..p-1}; the thrown
  /// diagnostic names the offending index or group.
  void validate(Eigen::Index p) const;

  /// Position of the named group, if present.
  std::optional<int> find(const std::string& name) const;

  /// One singleton group per column, named after the column.
  static GroupStructure singletons(const std::vector<std::string>& names);

  /// All columns in a single group.
  static GroupStructure single_group(std::string name, Eigen::Index p);
};

/// Statistics removed by `standardize`, sufficient to invert the transform.
struct StandardizationRecord {
  double response_mean = 0.0;
  Eigen::VectorXd column_means;
  Eigen::VectorXd column_sds;
};

/// Lag matrix: output(t, j) = series[t + lags - 1 - j] for 0-based t, j, so
/// column 0 holds the most recent lag. Row t is aligned with the target
/// series[t + lags]; the output has T - lags rows.
Eigen::MatrixXd build_lag_matrix(const Eigen::VectorXd& series, int lags);

/// Demeans the response and transforms every covariate column to mean zero
/// and unit standard deviation (population denominator T, matching the
/// empirical norm convention used throughout). Throws DataError naming the
/// column if one is constant.
std::pair<TimeSeriesDataset, StandardizationRecord> standardize(
    const TimeSeriesDataset& data);

/// Exact inverse of `standardize` up to rounding.
TimeSeriesDataset inverse_standardize(const TimeSeriesDataset& data,
                                      const StandardizationRecord& record);

}  // namespace hdgc
