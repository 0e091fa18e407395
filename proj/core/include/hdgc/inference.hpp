#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hdgc/dataset.hpp"
#include "hdgc/hac.hpp"
#include "hdgc/nodewise.hpp"
#include "hdgc/sglasso.hpp"

namespace hdgc {

/// Debiased coordinates: beta_debiased = beta_hat_G + B_G with the one-step
/// correction B_G = Theta_G X'(y - X beta_hat)/T.
struct DebiasedEstimate {
  Eigen::VectorXd beta_debiased;
  Eigen::VectorXd bias_correction;
  std::vector<int> group;
};

DebiasedEstimate debias(const SgLassoFit& fit, const PrecisionEstimate& prec,
                        const TimeSeriesDataset& data);

/// Studentized coordinate: (debiased_j - beta0) / sqrt(Xi_jj / T). The index
/// j addresses the position within the group. Throws NumericError when the
/// variance entry is not positive.
double pivot(const DebiasedEstimate& est, const LongRunVariance& xi, int j, double beta0,
             Eigen::Index T);

/// Two-sided interval centered at the debiased coordinate with half-width
/// z_{(1+level)/2} * sqrt(Xi_jj / T), using the exact normal quantile.
std::pair<double, double> confidence_interval(const DebiasedEstimate& est,
                                              const LongRunVariance& xi, int j, Eigen::Index T,
                                              double level = 0.95);

struct GrangerTestResult {
  double wald_stat = 0.0;
  int dof = 0;          // numerical rank actually used in the pseudo-inverse
  int nominal_dof = 0;  // rows of R; differs from dof when R Xi R' is singular
  double p_value = 1.0;
  LongRunVariance xi;
  std::vector<std::pair<double, double>> ci_per_coordinate;  // 95%, one per group member
  KernelKind kernel_kind = KernelKind::parzen;
  double bandwidth = 0.0;
};

/// Wald statistic W = T (R d)' (R Xi R')^+ (R d) for H0: R beta_G = 0, with
/// d the debiased estimate. The generalized inverse zeroes eigenvalues below
/// 1e-10 times the largest; the reported dof is the retained rank and the
/// p-value comes from the chi-squared survival function at that rank.
/// R must have full row rank (checked via singular values); the error names
/// the redundant rows otherwise.
GrangerTestResult wald_test(const DebiasedEstimate& est, const LongRunVariance& xi,
                            const Eigen::MatrixXd& R, Eigen::Index T);

}  // namespace hdgc
