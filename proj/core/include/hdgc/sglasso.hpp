#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hdgc/dataset.hpp"

namespace hdgc {

/// Penalty 2 * lambda * Omega(b) with Omega(b) = alpha * |b|_1 +
/// (1 - alpha) * sum_G w_G |b_G|_2. alpha = 1 is the LASSO, alpha = 0 the
/// group LASSO. Group weights w_G are 1 unless sqrt_group_weights is set,
/// in which case w_G = sqrt(|G|).
struct PenaltySpec {
  double lambda = 0.0;
  double alpha = 1.0;
  GroupStructure groups;
  bool sqrt_group_weights = false;
};

/// Flat solver knobs, mirrored one-to-one by the CLI key-value config.
struct SolverSettings {
  double tol = 1e-8;          // max abs coefficient change per full cycle
  int max_cycles = 100000;
  double kkt_tol = 1e-7;      // stationarity certificate required for convergence
  int grid_size = 50;         // lambda path length
  double grid_min_ratio = 1e-4;
  bool record_objective = false;
};

struct SgLassoFit {
  Eigen::VectorXd beta;
  PenaltySpec penalty;
  Eigen::VectorXd residuals;  // y - X * beta, recomputed from the final beta
  double sigma2_hat = 0.0;    // ||residuals||_T^2 + lambda * Omega(beta)
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
  double last_coef_change = 0.0;
  std::vector<double> objective_trace;  // per cycle, when requested
};

struct CvResult {
  std::vector<double> lambda_grid;  // decreasing
  Eigen::MatrixXd cv_errors;        // grid x folds, held-out MSE
  Eigen::VectorXd mean_cv_error;
  double selected_lambda = 0.0;
  int selected_index = 0;
  std::vector<std::pair<int, int>> fold_boundaries;  // [begin, end) row ranges
};

/// Omega(b): nonnegative, zero iff b = 0.
double penalty_value(const Eigen::VectorXd& b, const PenaltySpec& spec);

/// Proximal operator of b -> step * lambda * Omega(b): per group, elementwise
/// soft-threshold at step * alpha * lambda followed by the group shrinkage
/// max(0, 1 - step * (1 - alpha) * lambda * w_G / ||.||_2).
Eigen::VectorXd prox_sparse_group(const Eigen::VectorXd& z, double step,
                                  const PenaltySpec& spec);

/// Solves min_b ||y - X b||_T^2 + 2 lambda Omega(b) by cyclic block
/// coordinate descent over the penalty groups; each block takes a proximal
/// gradient step of size 1 / L_G with L_G the top eigenvalue of
/// X_G' X_G / T. Convergence requires both a small coefficient change over a
/// full cycle and a stationarity certificate below settings.kkt_tol.
SgLassoFit fit_sglasso(const TimeSeriesDataset& data, const PenaltySpec& spec,
                       const SolverSettings& settings = {},
                       const Eigen::VectorXd* warm_start = nullptr);

/// Largest violation of the stationarity condition
/// X'(X beta - y)/T + lambda z = 0 for z in the penalty subdifferential;
/// zero at an exact solution.
double kkt_violation(const SgLassoFit& fit, const TimeSeriesDataset& data);

/// Log-spaced path from lambda_max (the smallest lambda with an all-zero
/// solution: |X'y/T|_inf / alpha when alpha > 0, otherwise the largest group
/// norm of X'y/T) down to min_ratio * lambda_max.
std::vector<double> lambda_grid(const TimeSeriesDataset& data, const PenaltySpec& spec,
                                int n_points, double min_ratio = 1e-4);

/// Blocked cross-validation: rows are split into n_folds contiguous blocks;
/// each lambda on the grid is fit on the complement of every block and
/// scored by held-out MSE. Ties select the larger lambda.
CvResult cv_select(const TimeSeriesDataset& data, const GroupStructure& groups, double alpha,
                   int n_folds = 10, std::vector<double> grid = {},
                   const SolverSettings& settings = {}, bool sqrt_group_weights = false);

}  // namespace hdgc
