#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hdgc/dataset.hpp"
#include "hdgc/hac.hpp"
#include "hdgc/sglasso.hpp"

namespace hdgc {

/// Gaussian AR(1) design: p independent covariate paths and one error path,
/// all with persistence rho, plus a sparse coefficient vector whose leading
/// n_active entries are Uniform(beta_min, beta_max).
struct DgpConfig {
  int T = 1000;
  int p = 10;
  double rho = 0.6;
  int n_active = 5;
  double beta_min = 0.0;
  double beta_max = 4.0;
  std::uint64_t seed = 0;
};

/// Draws (dataset, beta_true). Paths start from the stationary distribution
/// N(0, 1/(1-rho^2)) and y = X beta + u. The draw order is fixed (beta,
/// then covariate columns left to right, then the error path), so a seed
/// pins the dataset bit for bit. `beta_fixed` skips the beta draw.
std::pair<TimeSeriesDataset, Eigen::VectorXd> simulate_dgp(
    const DgpConfig& config, const Eigen::VectorXd* beta_fixed = nullptr);

/// Per-replication pipeline knobs.
struct ReplicationSettings {
  std::vector<double> mt_grid = {20.0};
  KernelKind kernel = KernelKind::parzen;
  double alpha = 1.0;  // 1 = LASSO
  int n_folds = 10;
  SolverSettings solver;
  bool standardize = false;  // the DGP is already centered; off by default
};

/// Pivots and interval lengths for every coordinate at every bandwidth,
/// from one simulated dataset: CV fit, nodewise precision rows for all
/// coordinates, debiasing, then one HAC matrix per bandwidth.
struct ReplicationResult {
  Eigen::MatrixXd pivots;      // n_mt x p, (debiased_j - beta_j) / sqrt(Xi_jj / T)
  Eigen::MatrixXd ci_lengths;  // n_mt x p, 2 * 1.96 * sqrt(Xi_jj / T)
  Eigen::VectorXd beta_hat;    // length p, the penalized estimate
  Eigen::VectorXd debiased;    // length p
  Eigen::VectorXd beta_true;   // length p
  bool converged = true;       // main fit reached its stationarity certificate
  bool valid = true;           // false when a numerical failure was recorded
  std::string note;
};

ReplicationResult run_replication(const DgpConfig& config, const ReplicationSettings& settings,
                                  const Eigen::VectorXd* beta_fixed = nullptr);

/// One row per bandwidth: coverage of the nominal-0.95 interval and average
/// interval length, separately over active and inactive coordinates.
struct CoverageRow {
  double mt = 0.0;
  int p = 0;
  int T = 0;
  double avcov_active = 0.0;
  double avcov_inactive = 0.0;
  double length_active = 0.0;
  double length_inactive = 0.0;
};

struct CoverageTable {
  std::vector<CoverageRow> rows;
  int n_reps = 0;  // replications actually aggregated
};

/// Empirical coverage (1/N) sum 1{pivot in [-1.96, 1.96]} and average length
/// (1/N) sum 2*1.96*sqrt(Xi_jj/T), per coordinate, then averaged over the
/// active and inactive sets. Lengths accumulate with compensated summation
/// so the result does not depend on replication order.
CoverageTable aggregate_coverage(const std::vector<ReplicationResult>& replications,
                                 const std::vector<double>& mt_grid, int T, int p);

struct ExperimentConfig {
  DgpConfig dgp;
  int n_reps = 500;
  ReplicationSettings rep;
  bool redraw_beta = true;  // fresh beta per replication; false freezes one draw
  int threads = 0;          // 0 = hardware concurrency
};

struct ExperimentResult {
  CoverageTable table;
  std::vector<ReplicationResult> replications;  // indexed by replication
  int n_nonconverged = 0;
  int n_failed = 0;
};

/// Runs n_reps independent replications (in parallel when threads > 1) with
/// per-replication seeds split from dgp.seed by a counter, merges results by
/// replication index, and aggregates. The output is a deterministic
/// function of the config, whatever the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace hdgc
