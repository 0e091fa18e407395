#include "hdgc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdgc/distributions.hpp"
#include "hdgc/errors.hpp"

namespace hdgc {

DebiasedEstimate debias(const SgLassoFit& fit, const PrecisionEstimate& prec,
                        const TimeSeriesDataset& data) {
  if (fit.beta.size() != data.p() || fit.residuals.size() != data.T()) {
    throw DimensionError("fit does not match the dataset");
  }
  if (prec.rows().cols() != data.p()) {
    throw DimensionError("precision rows do not match the dataset width");
  }

  const Eigen::VectorXd moment = data.X.transpose() * fit.residuals / static_cast<double>(data.T());
  DebiasedEstimate est;
  est.group = prec.requested();
  est.bias_correction = prec.rows() * moment;
  est.beta_debiased.resize(est.bias_correction.size());
  for (Eigen::Index i = 0; i < est.bias_correction.size(); ++i) {
    est.beta_debiased(i) = fit.beta(est.group[static_cast<size_t>(i)]) + est.bias_correction(i);
  }
  return est;
}

namespace {

double checked_variance(const LongRunVariance& xi, int j) {
  if (j < 0 || j >= xi.xi.rows()) {
    throw DimensionError("coordinate " + std::to_string(j) + " outside the group");
  }
  const double v = xi.xi(j, j);
  if (!(v > 0.0)) {
    throw NumericError("long-run variance entry " + std::to_string(j) + " is " +
                       std::to_string(v) + "; cannot studentize");
  }
  return v;
}

}  // namespace

double pivot(const DebiasedEstimate& est, const LongRunVariance& xi, int j, double beta0,
             Eigen::Index T) {
  const double v = checked_variance(xi, j);
  return (est.beta_debiased(j) - beta0) / std::sqrt(v / static_cast<double>(T));
}

std::pair<double, double> confidence_interval(const DebiasedEstimate& est,
                                              const LongRunVariance& xi, int j, Eigen::Index T,
                                              double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  const double v = checked_variance(xi, j);
  const double half = normal_quantile(0.5 * (1.0 + level)) * std::sqrt(v / static_cast<double>(T));
  const double center = est.beta_debiased(j);
  return {center - half, center + half};
}

GrangerTestResult wald_test(const DebiasedEstimate& est, const LongRunVariance& xi,
                            const Eigen::MatrixXd& R, Eigen::Index T) {
  const Eigen::Index g = est.beta_debiased.size();
  if (xi.xi.rows() != g || xi.xi.cols() != g) {
    throw DimensionError("long-run variance does not match the group size");
  }
  if (R.cols() != g) throw DimensionError("restriction matrix has the wrong width");
  if (R.rows() < 1) throw DimensionError("restriction matrix needs at least one row");

  // Full-row-rank check; on failure, rank-revealing QR on R' names the rows
  // that add nothing to the span.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  const double sigma_max = svd.singularValues()(0);
  const double rank_tol = 1e-10 * sigma_max;
  if (R.rows() > g || svd.singularValues()(svd.singularValues().size() - 1) <= rank_tol) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R.transpose());
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    std::string rows;
    for (Eigen::Index i = rank; i < R.rows(); ++i) {
      if (!rows.empty()) rows += ", ";
      rows += std::to_string(qr.colsPermutation().indices()(i));
    }
    throw ConfigError("restriction matrix is rank deficient: rows {" + rows +
                      "} are linear combinations of the others");
  }

  const Eigen::VectorXd m = R * est.beta_debiased;
  Eigen::MatrixXd S = R * xi.xi * R.transpose();
  S = 0.5 * (S + S.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double lambda_max = values.maxCoeff();
  if (!(lambda_max > 0.0)) {
    throw NumericError("restricted long-run variance has no positive eigenvalue");
  }
  const double cutoff = 1e-10 * lambda_max;

  int rank_used = 0;
  double wald = 0.0;
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * m;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > cutoff) {
      wald += proj(i) * proj(i) / values(i);
      ++rank_used;
    }
  }
  wald *= static_cast<double>(T);
  wald = std::max(wald, 0.0);

  GrangerTestResult result;
  result.wald_stat = wald;
  result.dof = rank_used;
  result.nominal_dof = static_cast<int>(R.rows());
  result.p_value = chi2_sf(wald, std::max(rank_used, 1));
  result.xi = xi;
  result.kernel_kind = xi.kernel.kind;
  result.bandwidth = xi.kernel.bandwidth;
  result.ci_per_coordinate.reserve(static_cast<size_t>(g));
  for (Eigen::Index j = 0; j < g; ++j) {
    result.ci_per_coordinate.push_back(confidence_interval(est, xi, static_cast<int>(j), T));
  }
  return result;
}

}  // namespace hdgc
