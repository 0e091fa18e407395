#include "hdgc/sglasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hdgc/errors.hpp"

namespace hdgc {

namespace {

double group_weight(const PenaltySpec& spec, size_t g) {
  return spec.sqrt_group_weights
             ? std::sqrt(static_cast<double>(spec.groups.groups[g].second.size()))
             : 1.0;
}

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Prox of w -> step * lambda * (alpha |w|_1 + (1-alpha) w_g ||w||_2),
// written into `v` in place.
void prox_block(Eigen::VectorXd& v, double step, double lambda, double alpha, double wg) {
  const double t1 = step * lambda * alpha;
  if (t1 > 0.0) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = soft(v(i), t1);
  }
  const double t2 = step * lambda * (1.0 - alpha) * wg;
  if (t2 > 0.0) {
    const double norm = v.norm();
    if (norm <= t2) {
      v.setZero();
    } else {
      v *= 1.0 - t2 / norm;
    }
  }
}

// Stationarity violation given the gradient g = X'(X beta - y)/T.
double kkt_violation_impl(const Eigen::VectorXd& beta, const Eigen::VectorXd& grad,
                          const PenaltySpec& spec) {
  const double lambda = spec.lambda;
  const double alpha = spec.alpha;
  double worst = 0.0;
  for (size_t g = 0; g < spec.groups.groups.size(); ++g) {
    const auto& idx = spec.groups.groups[g].second;
    const double wg = group_weight(spec, g);
    double group_norm = 0.0;
    for (int j : idx) group_norm += beta(j) * beta(j);
    group_norm = std::sqrt(group_norm);

    if (group_norm > 0.0) {
      for (int j : idx) {
        if (beta(j) != 0.0) {
          const double z = alpha * (beta(j) > 0.0 ? 1.0 : -1.0) +
                           (1.0 - alpha) * wg * beta(j) / group_norm;
          worst = std::max(worst, std::abs(grad(j) + lambda * z));
        } else {
          worst = std::max(worst, std::abs(grad(j)) - lambda * alpha);
        }
      }
    } else {
      // Inactive group: the l1 subgradient can absorb up to lambda*alpha per
      // coordinate; whatever remains must fit in the group-norm ball.
      double resid_norm = 0.0;
      for (int j : idx) {
        const double h = soft(grad(j), lambda * alpha);
        resid_norm += h * h;
      }
      resid_norm = std::sqrt(resid_norm);
      worst = std::max(worst, resid_norm - lambda * (1.0 - alpha) * wg);
    }
  }
  return std::max(worst, 0.0);
}

}  // namespace

double penalty_value(const Eigen::VectorXd& b, const PenaltySpec& spec) {
  double group_part = 0.0;
  for (size_t g = 0; g < spec.groups.groups.size(); ++g) {
    const auto& idx = spec.groups.groups[g].second;
    double sq = 0.0;
    for (int j : idx) sq += b(j) * b(j);
    group_part += group_weight(spec, g) * std::sqrt(sq);
  }
  return spec.alpha * b.lpNorm<1>() + (1.0 - spec.alpha) * group_part;
}

Eigen::VectorXd prox_sparse_group(const Eigen::VectorXd& z, double step,
                                  const PenaltySpec& spec) {
  if (!(step > 0.0)) {
    throw ConfigError("prox step must be positive, got " + std::to_string(step));
  }
  spec.groups.validate(z.size());
  Eigen::VectorXd out = z;
  for (size_t g = 0; g < spec.groups.groups.size(); ++g) {
    const auto& idx = spec.groups.groups[g].second;
    Eigen::VectorXd block(static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) block(static_cast<Eigen::Index>(i)) = z(idx[i]);
    prox_block(block, step, spec.lambda, spec.alpha, group_weight(spec, g));
    for (size_t i = 0; i < idx.size(); ++i) out(idx[i]) = block(static_cast<Eigen::Index>(i));
  }
  return out;
}

SgLassoFit fit_sglasso(const TimeSeriesDataset& data, const PenaltySpec& spec,
                       const SolverSettings& settings, const Eigen::VectorXd* warm_start) {
  const Eigen::Index T = data.T();
  const Eigen::Index p = data.p();
  if (data.X.rows() != T) throw DimensionError("design and response row counts differ");
  spec.groups.validate(p);
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1], got " + std::to_string(spec.alpha));
  }
  if (spec.lambda < 0.0) throw ConfigError("lambda must be >= 0");

  const size_t n_groups = spec.groups.groups.size();
  const double Td = static_cast<double>(T);

  // Gather each group's columns once; the per-block step is 1/L_g with L_g
  // the top eigenvalue of X_g' X_g / T.
  std::vector<Eigen::MatrixXd> block_X(n_groups);
  std::vector<double> block_L(n_groups);
  std::vector<double> block_w(n_groups);
  for (size_t g = 0; g < n_groups; ++g) {
    const auto& idx = spec.groups.groups[g].second;
    Eigen::MatrixXd Xg(T, static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) Xg.col(static_cast<Eigen::Index>(i)) = data.X.col(idx[i]);
    if (idx.size() == 1) {
      block_L[g] = Xg.col(0).squaredNorm() / Td;
    } else {
      Eigen::MatrixXd gram = Xg.transpose() * Xg / Td;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
      block_L[g] = eig.eigenvalues().maxCoeff();
    }
    block_w[g] = group_weight(spec, g);
    block_X[g] = std::move(Xg);
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (warm_start != nullptr) {
    if (warm_start->size() != p) throw DimensionError("warm start has the wrong length");
    beta = *warm_start;
  }
  Eigen::VectorXd residual =
      (warm_start != nullptr) ? (data.y - data.X * beta).eval() : data.y;

  SgLassoFit fit;
  fit.penalty = spec;

  Eigen::VectorXd block_beta, block_new;
  double max_delta = std::numeric_limits<double>::infinity();
  int cycle = 0;
  bool converged = false;

  while (cycle < settings.max_cycles) {
    ++cycle;
    max_delta = 0.0;
    for (size_t g = 0; g < n_groups; ++g) {
      if (!(block_L[g] > 0.0)) continue;  // all-zero columns stay at zero
      const auto& idx = spec.groups.groups[g].second;
      const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
      block_beta.resize(m);
      for (Eigen::Index i = 0; i < m; ++i) block_beta(i) = beta(idx[static_cast<size_t>(i)]);

      block_new.noalias() = block_X[g].transpose() * residual;
      block_new = block_beta + block_new / (Td * block_L[g]);
      prox_block(block_new, 1.0 / block_L[g], spec.lambda, spec.alpha, block_w[g]);

      double local = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        local = std::max(local, std::abs(block_new(i) - block_beta(i)));
      }
      if (local > 0.0) {
        residual.noalias() -= block_X[g] * (block_new - block_beta);
        for (Eigen::Index i = 0; i < m; ++i) beta(idx[static_cast<size_t>(i)]) = block_new(i);
      }
      max_delta = std::max(max_delta, local);
    }

    const double objective = residual.squaredNorm() / Td + 2.0 * spec.lambda * penalty_value(beta, spec);
    if (!std::isfinite(objective)) {
      throw NumericError("sg-LASSO objective diverged after " + std::to_string(cycle) + " cycles");
    }
    if (settings.record_objective) fit.objective_trace.push_back(objective);

    if (max_delta < settings.tol) {
      Eigen::VectorXd grad = -(data.X.transpose() * residual) / Td;
      const double viol = kkt_violation_impl(beta, grad, spec);
      if (viol < settings.kkt_tol) {
        converged = true;
        break;
      }
      if (max_delta == 0.0) break;  // exact fixed point that still fails the certificate
    }
  }

  fit.beta = std::move(beta);
  fit.residuals = data.y - data.X * fit.beta;
  const double rss_T = fit.residuals.squaredNorm() / Td;
  const double omega = penalty_value(fit.beta, spec);
  fit.objective_value = rss_T + 2.0 * spec.lambda * omega;
  fit.sigma2_hat = rss_T + spec.lambda * omega;
  fit.iterations = cycle;
  fit.converged = converged;
  fit.last_coef_change = max_delta;
  return fit;
}

double kkt_violation(const SgLassoFit& fit, const TimeSeriesDataset& data) {
  if (fit.beta.size() != data.p() || fit.residuals.size() != data.T()) {
    throw DimensionError("fit does not match the dataset");
  }
  Eigen::VectorXd grad = -(data.X.transpose() * fit.residuals) / static_cast<double>(data.T());
  return kkt_violation_impl(fit.beta, grad, fit.penalty);
}

std::vector<double> lambda_grid(const TimeSeriesDataset& data, const PenaltySpec& spec,
                                int n_points, double min_ratio) {
  if (n_points < 1) throw ConfigError("lambda grid needs at least one point");
  if (!(min_ratio > 0.0 && min_ratio <= 1.0)) {
    throw ConfigError("grid_min_ratio must lie in (0, 1]");
  }
  spec.groups.validate(data.p());

  const Eigen::VectorXd c = data.X.transpose() * data.y / static_cast<double>(data.T());
  double lambda_max = 0.0;
  if (spec.alpha > 0.0) {
    lambda_max = c.lpNorm<Eigen::Infinity>() / spec.alpha;
  } else {
    for (size_t g = 0; g < spec.groups.groups.size(); ++g) {
      const auto& idx = spec.groups.groups[g].second;
      double sq = 0.0;
      for (int j : idx) sq += c(j) * c(j);
      lambda_max = std::max(lambda_max, std::sqrt(sq) / group_weight(spec, g));
    }
  }
  lambda_max = std::max(lambda_max, 1e-300);

  std::vector<double> grid(static_cast<size_t>(n_points));
  if (n_points == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  for (int i = 0; i < n_points; ++i) {
    grid[static_cast<size_t>(i)] =
        lambda_max * std::pow(min_ratio, static_cast<double>(i) / static_cast<double>(n_points - 1));
  }
  return grid;
}

CvResult cv_select(const TimeSeriesDataset& data, const GroupStructure& groups, double alpha,
                   int n_folds, std::vector<double> grid, const SolverSettings& settings,
                   bool sqrt_group_weights) {
  const Eigen::Index T = data.T();
  if (n_folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (static_cast<Eigen::Index>(n_folds) > T / 2) {
    throw ConfigError("fold too small to fit: " + std::to_string(n_folds) +
                      " folds over " + std::to_string(T) + " rows");
  }

  PenaltySpec spec;
  spec.alpha = alpha;
  spec.groups = groups;
  spec.sqrt_group_weights = sqrt_group_weights;

  if (grid.empty()) {
    grid = lambda_grid(data, spec, settings.grid_size, settings.grid_min_ratio);
  }
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  const int n_grid = static_cast<int>(grid.size());

  CvResult result;
  result.lambda_grid = grid;
  result.cv_errors.resize(n_grid, n_folds);
  result.fold_boundaries.reserve(static_cast<size_t>(n_folds));
  for (int f = 0; f < n_folds; ++f) {
    const int begin = static_cast<int>(static_cast<Eigen::Index>(f) * T / n_folds);
    const int end = static_cast<int>(static_cast<Eigen::Index>(f + 1) * T / n_folds);
    result.fold_boundaries.emplace_back(begin, end);
  }

  SolverSettings fold_settings = settings;
  fold_settings.record_objective = false;

  for (int f = 0; f < n_folds; ++f) {
    const auto [begin, end] = result.fold_boundaries[static_cast<size_t>(f)];
    const Eigen::Index n_test = end - begin;
    const Eigen::Index n_train = T - n_test;
    if (n_train < 2) throw ConfigError("fold too small to fit");

    TimeSeriesDataset train;
    train.column_names = data.column_names;
    train.y.resize(n_train);
    train.X.resize(n_train, data.p());
    train.y.head(begin) = data.y.head(begin);
    train.X.topRows(begin) = data.X.topRows(begin);
    train.y.tail(T - end) = data.y.tail(T - end);
    train.X.bottomRows(T - end) = data.X.bottomRows(T - end);

    const auto y_test = data.y.segment(begin, n_test);
    const auto X_test = data.X.middleRows(begin, n_test);

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(data.p());
    for (int gi = 0; gi < n_grid; ++gi) {
      spec.lambda = grid[static_cast<size_t>(gi)];
      SgLassoFit fit = fit_sglasso(train, spec, fold_settings, &warm);
      warm = fit.beta;
      result.cv_errors(gi, f) =
          (y_test - X_test * fit.beta).squaredNorm() / static_cast<double>(n_test);
    }
  }

  result.mean_cv_error = result.cv_errors.rowwise().mean();
  int best = 0;
  for (int gi = 1; gi < n_grid; ++gi) {
    if (result.mean_cv_error(gi) < result.mean_cv_error(best)) best = gi;  // ties keep larger lambda
  }
  result.selected_index = best;
  result.selected_lambda = grid[static_cast<size_t>(best)];
  return result;
}

}  // namespace hdgc
