#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hdgc/dataset.hpp"
#include "hdgc/sglasso.hpp"

namespace hdgc {

/// One nodewise LASSO regression: column j on all remaining columns, with
/// the regularized error variance sigma2_j = ||X_j - X_{-j} gamma||_T^2 +
/// lambda_j |gamma|_1.
struct NodewiseRow {
  int j = 0;
  Eigen::VectorXd gamma_hat;  // length p - 1, coefficients of X_{-j}
  double sigma2_j = 0.0;
  double lambda_j = 0.0;
};

/// Rows of the precision matrix assembled from nodewise regressions via the
/// partitioned inverse: Theta_j = sigma_j^{-2} (1, -gamma_j') with the
/// entries placed back in original column order.
class PrecisionEstimate {
 public:
  static PrecisionEstimate from_rows(const std::vector<NodewiseRow>& rows, Eigen::Index p);
  /// Direct construction from explicit rows (tests, exact inverses).
  static PrecisionEstimate from_matrix(std::vector<int> requested, Eigen::MatrixXd rows);

  const std::vector<int>& requested() const { return requested_; }
  const Eigen::MatrixXd& rows() const { return rows_; }  // |G| x p, in request order
  bool has(int j) const;
  Eigen::RowVectorXd row(int j) const;  // throws if j was not requested
  const std::vector<NodewiseRow>& detail() const { return detail_; }

 private:
  std::vector<int> requested_;
  Eigen::MatrixXd rows_;
  std::vector<NodewiseRow> detail_;
};

/// Lasso regression of column j on the remaining columns at penalty
/// lambda_j. Throws NumericError when the regularized variance falls below
/// 1e-12 (degenerate design).
NodewiseRow fit_nodewise_row(const TimeSeriesDataset& data, int j, double lambda_j,
                             const SolverSettings& settings = {});

/// Nodewise rows for every index in G. An empty `lambdas` selects each
/// lambda_j by blocked cross-validation; a single value applies to all rows;
/// otherwise one value per requested row.
PrecisionEstimate estimate_precision_rows(const TimeSeriesDataset& data,
                                          const std::vector<int>& G,
                                          const std::vector<double>& lambdas = {},
                                          int n_folds = 10,
                                          const SolverSettings& settings = {});

/// max over requested rows j of |(I - Theta Sigma)_j|_inf with
/// Sigma = X'X/T; bounded by lambda_j / sigma2_j at an exact solution.
double identity_defect(const PrecisionEstimate& prec, const TimeSeriesDataset& data);

}  // namespace hdgc
