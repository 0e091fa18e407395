#include "hdgc/dataset.hpp"

#include <cmath>
#include <set>
#include <string>
#include <unordered_map>

#include "hdgc/errors.hpp"

namespace hdgc {

TimeSeriesDataset TimeSeriesDataset::create(Eigen::VectorXd y, Eigen::MatrixXd X,
                                            std::vector<std::string> column_names) {
  TimeSeriesDataset data{std::move(y), std::move(X), std::move(column_names)};
  validate_dataset(data);
  return data;
}

void validate_dataset(const TimeSeriesDataset& data) {
  if (data.T() < 1 || data.p() < 1) {
    throw DimensionError("dataset must have T >= 1 rows and p >= 1 columns");
  }
  if (data.X.rows() != data.T()) {
    throw DimensionError("design matrix has " + std::to_string(data.X.rows()) +
                         " rows but the response has " + std::to_string(data.T()));
  }
  if (static_cast<Eigen::Index>(data.column_names.size()) != data.p()) {
    throw DimensionError("expected " + std::to_string(data.p()) + " column names, got " +
                         std::to_string(data.column_names.size()));
  }
  if (!data.y.allFinite()) {
    throw DataError("response contains a non-finite value");
  }
  if (!data.X.allFinite()) {
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      if (!data.X.col(j).allFinite()) {
        throw DataError("column '" + data.column_names[static_cast<size_t>(j)] +
                        "' contains a non-finite value");
      }
    }
  }
  std::set<std::string> seen;
  for (const auto& name : data.column_names) {
    if (!seen.insert(name).second) {
      throw DataError("duplicate column name '" + name + "'");
    }
  }
}

void GroupStructure::validate(Eigen::Index p) const {
  // Partition check: every index in {0..p-1} exactly once, no empty group.
  std::vector<int> owner(static_cast<size_t>(p), -1);
  for (int g = 0; g < n_groups(); ++g) {
    const auto& [name, idx] = groups[static_cast<size_t>(g)];
    if (idx.empty()) {
      throw DataError("group '" + name + "' is empty");
    }
    for (int j : idx) {
      if (j < 0 || j >= p) {
        throw DataError("group '" + name + "' references column index " +
                        std::to_string(j) + ", outside 0.." + std::to_string(p - 1));
      }
      if (owner[static_cast<size_t>(j)] >= 0) {
        throw DataError("column index " + std::to_string(j) + " appears in both group '" +
                        groups[static_cast<size_t>(owner[static_cast<size_t>(j)])].first +
                        "' and group '" + name + "'");
      }
      owner[static_cast<size_t>(j)] = g;
    }
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (owner[static_cast<size_t>(j)] < 0) {
      throw DataError("column index " + std::to_string(j) + " is not covered by any group");
    }
  }
}

std::optional<int> GroupStructure::find(const std::string& name) const {
  for (int g = 0; g < n_groups(); ++g) {
    if (groups[static_cast<size_t>(g)].first == name) return g;
  }
  return std::nullopt;
}

GroupStructure GroupStructure::singletons(const std::vector<std::string>& names) {
  GroupStructure gs;
  gs.groups.reserve(names.size());
  for (size_t j = 0; j < names.size(); ++j) {
    gs.groups.emplace_back(names[j], std::vector<int>{static_cast<int>(j)});
  }
  return gs;
}

GroupStructure GroupStructure::single_group(std::string name, Eigen::Index p) {
  std::vector<int> idx(static_cast<size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) idx[static_cast<size_t>(j)] = static_cast<int>(j);
  GroupStructure gs;
  gs.groups.emplace_back(std::move(name), std::move(idx));
  return gs;
}

Eigen::MatrixXd build_lag_matrix(const Eigen::VectorXd& series, int lags) {
  if (lags < 1) {
    throw ConfigError("lag count must be >= 1, got " + std::to_string(lags));
  }
  const Eigen::Index T = series.size();
  if (lags >= T) {
    throw DimensionError("lag count " + std::to_string(lags) +
                         " must be smaller than the series length " + std::to_string(T));
  }
  Eigen::MatrixXd out(T - lags, lags);
  for (Eigen::Index t = 0; t < T - lags; ++t) {
    for (int j = 0; j < lags; ++j) {
      out(t, j) = series(t + lags - 1 - j);
    }
  }
  return out;
}

std::pair<TimeSeriesDataset, StandardizationRecord> standardize(const TimeSeriesDataset& data) {
  const Eigen::Index T = data.T();
  const Eigen::Index p = data.p();

  StandardizationRecord record;
  record.response_mean = data.y.mean();
  record.column_means = data.X.colwise().mean();
  record.column_sds.resize(p);

  TimeSeriesDataset out;
  out.column_names = data.column_names;
  out.y = data.y.array() - record.response_mean;
  out.X.resize(T, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd centered = data.X.col(j).array() - record.column_means(j);
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(T));
    const double scale = std::max(1.0, std::abs(record.column_means(j)));
    if (!(sd > 1e-12 * scale)) {
      throw DataError("column '" + data.column_names[static_cast<size_t>(j)] +
                      "' is constant (standard deviation " + std::to_string(sd) + ")");
    }
    record.column_sds(j) = sd;
    out.X.col(j) = centered / sd;
  }
  return {std::move(out), std::move(record)};
}

TimeSeriesDataset inverse_standardize(const TimeSeriesDataset& data,
                                      const StandardizationRecord& record) {
  if (record.column_means.size() != data.p() || record.column_sds.size() != data.p()) {
    throw DimensionError("standardization record does not match the dataset width");
  }
  TimeSeriesDataset out;
  out.column_names = data.column_names;
  out.y = data.y.array() + record.response_mean;
  out.X.resize(data.T(), data.p());
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    out.X.col(j) = data.X.col(j).array() * record.column_sds(j) + record.column_means(j);
  }
  return out;
}

}  // namespace hdgc
