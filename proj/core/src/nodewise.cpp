#include "hdgc/nodewise.hpp"

#include <cmath>
#include <string>

#include "hdgc/errors.hpp"

namespace hdgc {

namespace {

// Nodewise regression problem for column j: response X_j, design X_{-j}.
TimeSeriesDataset leave_one_out(const TimeSeriesDataset& data, int j) {
  TimeSeriesDataset out;
  out.y = data.X.col(j);
  out.X.resize(data.T(), data.p() - 1);
  out.column_names.reserve(static_cast<size_t>(data.p() - 1));
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < data.p(); ++k) {
    if (k == j) continue;
    out.X.col(col++) = data.X.col(k);
    out.column_names.push_back(data.column_names[static_cast<size_t>(k)]);
  }
  return out;
}

}  // namespace

PrecisionEstimate PrecisionEstimate::from_rows(const std::vector<NodewiseRow>& rows,
                                               Eigen::Index p) {
  PrecisionEstimate prec;
  prec.rows_.resize(static_cast<Eigen::Index>(rows.size()), p);
  prec.requested_.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    const NodewiseRow& nw = rows[i];
    if (nw.gamma_hat.size() != p - 1) {
      throw DimensionError("nodewise row " + std::to_string(nw.j) + " has the wrong length");
    }
    const double inv_sigma2 = 1.0 / nw.sigma2_j;
    Eigen::Index col = 0;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (k == nw.j) {
        prec.rows_(static_cast<Eigen::Index>(i), k) = inv_sigma2;
      } else {
        prec.rows_(static_cast<Eigen::Index>(i), k) = -nw.gamma_hat(col++) * inv_sigma2;
      }
    }
    prec.requested_.push_back(nw.j);
  }
  prec.detail_ = rows;
  return prec;
}

PrecisionEstimate PrecisionEstimate::from_matrix(std::vector<int> requested,
                                                 Eigen::MatrixXd rows) {
  if (static_cast<Eigen::Index>(requested.size()) != rows.rows()) {
    throw DimensionError("requested index count does not match the row count");
  }
  PrecisionEstimate prec;
  prec.requested_ = std::move(requested);
  prec.rows_ = std::move(rows);
  return prec;
}

bool PrecisionEstimate::has(int j) const {
  for (int k : requested_) {
    if (k == j) return true;
  }
  return false;
}

Eigen::RowVectorXd PrecisionEstimate::row(int j) const {
  for (size_t i = 0; i < requested_.size(); ++i) {
    if (requested_[i] == j) return rows_.row(static_cast<Eigen::Index>(i));
  }
  throw DimensionError("precision row " + std::to_string(j) + " was not computed");
}

NodewiseRow fit_nodewise_row(const TimeSeriesDataset& data, int j, double lambda_j,
                             const SolverSettings& settings) {
  if (data.p() < 2) throw DimensionError("nodewise regression needs p >= 2 columns");
  if (j < 0 || j >= data.p()) {
    throw DimensionError("column index " + std::to_string(j) + " out of range");
  }

  const TimeSeriesDataset node = leave_one_out(data, j);
  PenaltySpec spec;
  spec.lambda = lambda_j;
  spec.alpha = 1.0;
  spec.groups = GroupStructure::singletons(node.column_names);
  const SgLassoFit fit = fit_sglasso(node, spec, settings);

  NodewiseRow row;
  row.j = j;
  row.gamma_hat = fit.beta;
  row.lambda_j = lambda_j;
  row.sigma2_j = fit.residuals.squaredNorm() / static_cast<double>(data.T()) +
                 lambda_j * fit.beta.lpNorm<1>();
  if (!(row.sigma2_j > 1e-12)) {
    throw NumericError("nodewise variance for column " + std::to_string(j) + " is " +
                       std::to_string(row.sigma2_j) + "; design is near singular");
  }
  return row;
}

PrecisionEstimate estimate_precision_rows(const TimeSeriesDataset& data,
                                          const std::vector<int>& G,
                                          const std::vector<double>& lambdas, int n_folds,
                                          const SolverSettings& settings) {
  if (G.empty()) throw ConfigError("no precision rows requested");
  if (!lambdas.empty() && lambdas.size() != 1 && lambdas.size() != G.size()) {
    throw ConfigError("expected 0, 1, or " + std::to_string(G.size()) +
                      " nodewise penalties, got " + std::to_string(lambdas.size()));
  }

  std::vector<NodewiseRow> rows;
  rows.reserve(G.size());
  for (size_t i = 0; i < G.size(); ++i) {
    const int j = G[i];
    double lambda_j = 0.0;
    if (lambdas.empty()) {
      const TimeSeriesDataset node = leave_one_out(data, j);
      const CvResult cv = cv_select(node, GroupStructure::singletons(node.column_names),
                                    /*alpha=*/1.0, n_folds, {}, settings);
      lambda_j = cv.selected_lambda;
    } else {
      lambda_j = lambdas.size() == 1 ? lambdas[0] : lambdas[i];
    }
    rows.push_back(fit_nodewise_row(data, j, lambda_j, settings));
  }
  return PrecisionEstimate::from_rows(rows, data.p());
}

double identity_defect(const PrecisionEstimate& prec, const TimeSeriesDataset& data) {
  const Eigen::Index p = data.p();
  if (prec.rows().cols() != p) throw DimensionError("precision rows do not match the dataset");
  const Eigen::MatrixXd sigma_hat = data.X.transpose() * data.X / static_cast<double>(data.T());
  double worst = 0.0;
  for (size_t i = 0; i < prec.requested().size(); ++i) {
    Eigen::RowVectorXd row = prec.rows().row(static_cast<Eigen::Index>(i)) * sigma_hat;
    row(prec.requested()[i]) -= 1.0;
    worst = std::max(worst, row.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace hdgc
