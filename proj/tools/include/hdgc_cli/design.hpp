#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdgc/csv.hpp"
#include "hdgc/dataset.hpp"

namespace hdgc::cli {

/// How to turn an ingested CSV into a regression problem.
struct DesignOptions {
  std::string response;
  int horizon = 1;  // target y[t + horizon] on row-t regressors
  int ylags = 0;    // own lags y[t], y[t-1], ... as a "<response>_lags" group
  /// Ordered group spec: name -> covariate column names. Columns not named
  /// anywhere become singleton groups, in CSV order.
  std::vector<std::pair<std::string, std::vector<std::string>>> group_spec;
  /// Groups whose columns are a high-frequency lag block (most recent lag
  /// first), standardized per lag column and aggregated with a Legendre
  /// dictionary before entering the design.
  std::vector<std::string> midas_groups;
  int legendre_degree = 3;
  bool standardize = true;  // demean the response, unit-sd covariates
};

struct AssembledDesign {
  TimeSeriesDataset dataset;
  GroupStructure groups;
  std::vector<std::string> target_dates;  // date of the response in each row
  bool standardized = false;
  StandardizationRecord record;  // meaningful when standardized
};

AssembledDesign assemble_design(const CsvTable& table, const DesignOptions& options);

}  // namespace hdgc::cli
