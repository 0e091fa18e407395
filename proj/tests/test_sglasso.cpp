#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdgc/dataset.hpp"
#include "hdgc/errors.hpp"
#include "hdgc/rng.hpp"
#include "hdgc/sglasso.hpp"
#include "oracles.hpp"

using namespace hdgc;

namespace {

PenaltySpec make_spec(double lambda, double alpha, GroupStructure groups) {
  PenaltySpec spec;
  spec.lambda = lambda;
  spec.alpha = alpha;
  spec.groups = std::move(groups);
  return spec;
}

std::vector<std::string> names(int p) {
  std::vector<std::string> out;
  for (int j = 0; j < p; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

// Random contiguous partition of {0..p-1}.
GroupStructure random_partition(int p, Rng& rng) {
  GroupStructure gs;
  int start = 0;
  int g = 0;
  while (start < p) {
    const int size = 1 + static_cast<int>(rng.uniform() * 3.0);
    std::vector<int> idx;
    for (int j = start; j < std::min(p, start + size); ++j) idx.push_back(j);
    gs.groups.emplace_back("g" + std::to_string(++g), std::move(idx));
    start += size;
  }
  return gs;
}

// Independent check that `b` satisfies the prox subgradient condition
// z - b in step*lambda*dOmega(b).
double prox_subgradient_violation(const Eigen::VectorXd& z, const Eigen::VectorXd& b,
                                  double step, const PenaltySpec& spec) {
  const double t1 = step * spec.lambda * spec.alpha;
  const double t2 = step * spec.lambda * (1.0 - spec.alpha);
  double worst = 0.0;
  for (const auto& [name, idx] : spec.groups.groups) {
    double norm = 0.0;
    for (int j : idx) norm += b(j) * b(j);
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (int j : idx) {
        if (b(j) != 0.0) {
          const double want = t1 * (b(j) > 0 ? 1.0 : -1.0) + t2 * b(j) / norm;
          worst = std::max(worst, std::abs(z(j) - b(j) - want));
        } else {
          worst = std::max(worst, std::abs(z(j)) - t1);
        }
      }
    } else {
      double excess = 0.0;
      for (int j : idx) {
        const double h = std::max(std::abs(z(j)) - t1, 0.0);
        excess += h * h;
      }
      worst = std::max(worst, std::sqrt(excess) - t2);
    }
  }
  return std::max(worst, 0.0);
}

double prox_objective(const Eigen::VectorXd& b, const Eigen::VectorXd& z, double step,
                      const PenaltySpec& spec) {
  return 0.5 * (b - z).squaredNorm() + step * spec.lambda * penalty_value(b, spec);
}

}  // namespace

TEST_SUITE("sglasso") {

TEST_CASE("penalty value") {
  const GroupStructure one = GroupStructure::single_group("g", 2);
  Eigen::VectorXd b(2);
  b << 3, 4;
  CHECK(penalty_value(Eigen::VectorXd::Zero(2), make_spec(1.0, 0.5, one)) == 0.0);
  CHECK(penalty_value(b, make_spec(1.0, 0.0, one)) == doctest::Approx(5.0));
  CHECK(penalty_value(b, make_spec(1.0, 0.5, one)) == doctest::Approx(6.0));
  CHECK(penalty_value(b, make_spec(1.0, 1.0, one)) == doctest::Approx(7.0));
}

TEST_CASE("prox with zero penalty is the identity") {
  Rng rng(1);
  Eigen::VectorXd z(5);
  for (int i = 0; i < 5; ++i) z(i) = rng.gaussian();
  const Eigen::VectorXd out =
      prox_sparse_group(z, 0.7, make_spec(0.0, 0.5, GroupStructure::singletons(names(5))));
  CHECK((out - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("prox full shrinkage") {
  Eigen::VectorXd z(2);
  z << 0.2, -0.1;
  const Eigen::VectorXd out =
      prox_sparse_group(z, 0.3, make_spec(1.0, 1.0, GroupStructure::singletons(names(2))));
  CHECK(out(0) == 0.0);
  CHECK(out(1) == 0.0);
}

TEST_CASE("prox group soft threshold closed form") {
  Eigen::VectorXd z(2);
  z << 3, 4;
  const PenaltySpec spec = make_spec(2.5, 0.0, GroupStructure::single_group("g", 2));
  const Eigen::VectorXd out = prox_sparse_group(z, 1.0, spec);
  CHECK(out(0) == doctest::Approx(1.5));
  CHECK(out(1) == doctest::Approx(2.0));

  // Cross-check against a 1e-4 grid search; the group prox is radial, so a
  // 1D scan of 0.5 (t - 5)^2 + 2.5 t over the ray through z suffices.
  double best_t = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t <= 10.0; t += 1e-4) {
    const double val = 0.5 * (t - 5.0) * (t - 5.0) + 2.5 * t;
    if (val < best_val) {
      best_val = val;
      best_t = t;
    }
  }
  CHECK(out.norm() == doctest::Approx(best_t).epsilon(1e-3));
}

TEST_CASE("prox solves its optimization problem on random instances") {
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 1 + static_cast<int>(rng.uniform() * 12.0);
    PenaltySpec spec;
    spec.groups = random_partition(p, rng);
    const double pick = rng.uniform();
    spec.alpha = pick < 0.25 ? 0.0 : (pick < 0.5 ? 1.0 : rng.uniform());
    spec.lambda = std::exp(rng.uniform(-3.0, 1.0));
    const double step = std::exp(rng.uniform(-2.0, 1.0));
    Eigen::VectorXd z(p);
    for (int i = 0; i < p; ++i) z(i) = 2.0 * rng.gaussian();

    const Eigen::VectorXd b = prox_sparse_group(z, step, spec);
    CHECK(prox_subgradient_violation(z, b, step, spec) < 1e-8);

    const double value = prox_objective(b, z, step, spec);
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd dir(p);
      for (int i = 0; i < p; ++i) dir(i) = rng.gaussian();
      dir *= 1e-3 / dir.norm();
      CHECK(prox_objective(b + dir, z, step, spec) > value - 1e-9);
    }
  }
}

TEST_CASE("lambda at the null threshold gives a zero fit") {
  Rng rng(4);
  const int T = 60, p = 4;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    y(t) = rng.gaussian();
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
  }
  const TimeSeriesDataset data{y, X, names(p)};
  const double lambda_max = (X.transpose() * y / T).lpNorm<Eigen::Infinity>();
  const auto fit = fit_sglasso(
      data, make_spec(lambda_max * 1.000001, 1.0, GroupStructure::singletons(names(p))));
  CHECK(fit.beta.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(fit.converged);
  CHECK(kkt_violation(fit, data) < 1e-10);

  // At the threshold itself rounding may leave coefficients at epsilon scale.
  const auto edge =
      fit_sglasso(data, make_spec(lambda_max, 1.0, GroupStructure::singletons(names(p))));
  CHECK(edge.beta.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("univariate fit is the soft-thresholded correlation") {
  Rng rng(7);
  const int T = 100;
  Eigen::VectorXd x(T);
  for (int t = 0; t < T; ++t) x(t) = rng.gaussian();
  x *= std::sqrt(static_cast<double>(T)) / x.norm();  // ||x||_T = 1
  const Eigen::VectorXd y = 0.8 * x;                  // <x, y>_T = 0.8
  const TimeSeriesDataset data{y, x, {"x1"}};
  const auto fit = fit_sglasso(data, make_spec(0.3, 1.0, GroupStructure::singletons({"x1"})));
  CHECK(fit.beta(0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(kkt_violation(fit, data) < 1e-8);
}

TEST_CASE("orthonormal group fit matches the block closed form") {
  Rng rng(19);
  const int T = 80;
  const Eigen::MatrixXd X = oracles::orthonormal_design(T, 2, rng);
  Eigen::VectorXd target(2);
  target << 0.6, 0.8;
  const Eigen::VectorXd y = X * target;  // X'y/T = (0.6, 0.8)
  const TimeSeriesDataset data{y, X, names(2)};
  const auto fit = fit_sglasso(data, make_spec(0.5, 0.0, GroupStructure::single_group("g", 2)));
  CHECK(fit.beta(0) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(fit.beta(1) == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(fit.converged);
}

TEST_CASE("kkt violation reacts to a perturbed coefficient") {
  Rng rng(31);
  const int T = 100;
  Eigen::MatrixXd X = oracles::orthonormal_design(T, 3, rng);
  Eigen::VectorXd coef(3);
  coef << 1.5, -2.0, 0.0;
  Eigen::VectorXd noise(T);
  for (int t = 0; t < T; ++t) noise(t) = 0.1 * rng.gaussian();
  const Eigen::VectorXd y = X * coef + noise;
  const TimeSeriesDataset data{y, X, names(3)};
  auto fit = fit_sglasso(data, make_spec(0.2, 1.0, GroupStructure::singletons(names(3))));
  CHECK(kkt_violation(fit, data) < 1e-8);

  fit.beta(0) += 0.1;
  fit.residuals = data.y - data.X * fit.beta;
  CHECK(kkt_violation(fit, data) >= 0.05);
}

TEST_CASE("stored residuals and objective are recomputable") {
  Rng rng(41);
  const int T = 70, p = 6;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    y(t) = rng.gaussian();
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
  }
  const TimeSeriesDataset data{y, X, names(p)};
  const PenaltySpec spec = make_spec(0.05, 0.4, random_partition(p, rng));
  const auto fit = fit_sglasso(data, spec);

  const Eigen::VectorXd recomputed = data.y - data.X * fit.beta;
  CHECK((fit.residuals - recomputed).cwiseAbs().maxCoeff() == 0.0);

  const double omega = penalty_value(fit.beta, spec);
  const double objective = fit.residuals.squaredNorm() / T + 2.0 * spec.lambda * omega;
  CHECK(std::abs(objective - fit.objective_value) < 1e-10);
  CHECK(fit.sigma2_hat >= fit.residuals.squaredNorm() / T);
  CHECK(std::abs(fit.sigma2_hat - (fit.residuals.squaredNorm() / T + spec.lambda * omega)) <
        1e-12);
}

TEST_CASE("objective trace is non-increasing") {
  Rng rng(53);
  const int T = 60, p = 10;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    y(t) = rng.gaussian();
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian() + 0.5 * X(t, std::max(j - 1, 0));
  }
  const TimeSeriesDataset data{y, X, names(p)};
  SolverSettings settings;
  settings.record_objective = true;
  for (double alpha : {0.0, 0.5, 1.0}) {
    const auto fit =
        fit_sglasso(data, make_spec(0.1, alpha, random_partition(p, rng)), settings);
    REQUIRE(fit.objective_trace.size() >= 2);
    for (size_t i = 1; i < fit.objective_trace.size(); ++i) {
      CHECK(fit.objective_trace[i] <=
            fit.objective_trace[i - 1] + 1e-12 * std::abs(fit.objective_trace[i - 1]));
    }
  }
}

TEST_CASE("group lasso fits coincide with the coordinate descent reference at alpha=1") {
  Rng rng(59);
  SolverSettings settings;
  settings.tol = 1e-10;
  for (int rep = 0; rep < 20; ++rep) {
    const int T = 50, p = 10;
    Eigen::MatrixXd X(T, p);
    Eigen::VectorXd y(T);
    for (int t = 0; t < T; ++t) {
      y(t) = rng.gaussian();
      for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
    }
    const double lambda_max = (X.transpose() * y / T).lpNorm<Eigen::Infinity>();
    const double lambda = lambda_max * std::exp(rng.uniform(-3.0, -0.5));
    const TimeSeriesDataset data{y, X, names(p)};
    const auto fit =
        fit_sglasso(data, make_spec(lambda, 1.0, GroupStructure::singletons(names(p))),
                    settings);
    const Eigen::VectorXd reference = oracles::lasso_cd_reference(X, y, lambda);
    CHECK((fit.beta - reference).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("active groups satisfy the group-norm stationarity at alpha=0") {
  Rng rng(61);
  const int T = 90, p = 9;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
    y(t) = X(t, 0) - 0.8 * X(t, 4) + 0.3 * rng.gaussian();
  }
  const TimeSeriesDataset data{y, X, names(p)};
  GroupStructure gs;
  gs.groups = {{"a", {0, 1, 2}}, {"b", {3, 4, 5}}, {"c", {6, 7, 8}}};
  const double lambda = 0.08;
  const auto fit = fit_sglasso(data, make_spec(lambda, 0.0, gs));
  REQUIRE(fit.converged);
  for (const auto& [name, idx] : gs.groups) {
    double norm = 0.0;
    for (int j : idx) norm += fit.beta(j) * fit.beta(j);
    if (norm == 0.0) continue;
    Eigen::VectorXd grad(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
      grad(static_cast<Eigen::Index>(i)) = data.X.col(idx[i]).dot(fit.residuals) / T;
    }
    CHECK(std::abs(grad.norm() - lambda) < 1e-6);
  }
}

TEST_CASE("solver reports divergence on overflowing data") {
  const int T = 10;
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(T, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(T, 1e200);
  const TimeSeriesDataset data{y, X, {"x1"}};
  CHECK_THROWS_AS(fit_sglasso(data, make_spec(0.1, 1.0, GroupStructure::singletons({"x1"}))),
                  NumericError);
}

TEST_CASE("hitting the cycle cap reports non-convergence") {
  Rng rng(67);
  const int T = 40, p = 8;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    double base = rng.gaussian();
    for (int j = 0; j < p; ++j) X(t, j) = base + 0.05 * rng.gaussian();
    y(t) = rng.gaussian();
  }
  SolverSettings settings;
  settings.max_cycles = 1;
  const auto fit = fit_sglasso(TimeSeriesDataset{y, X, names(p)},
                               make_spec(1e-6, 1.0, GroupStructure::singletons(names(p))),
                               settings);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 1);
  CHECK(fit.last_coef_change > 0.0);
}

TEST_CASE("lambda grid thresholds") {
  Eigen::MatrixXd X(2, 3);
  Eigen::VectorXd y(2);
  // Construct X'y/T = (0.5, -2, 1) directly: T = 2, y = (1, 0).
  X << 1.0, -4.0, 2.0, 7.0, 3.0, -5.0;
  y << 1.0, 0.0;
  const TimeSeriesDataset data{y, X, names(3)};
  const auto grid1 = lambda_grid(data, make_spec(0, 1.0, GroupStructure::singletons(names(3))), 1);
  REQUIRE(grid1.size() == 1);
  CHECK(grid1[0] == doctest::Approx(2.0));

  const auto grid = lambda_grid(data, make_spec(0, 1.0, GroupStructure::singletons(names(3))), 7);
  REQUIRE(grid.size() == 7);
  CHECK(grid.front() == doctest::Approx(2.0));
  CHECK(grid.back() == doctest::Approx(2e-4));
  for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);

  // alpha = 0, one group with X'y/T = (3, 4): lambda_max = 5.
  Eigen::MatrixXd X2(2, 2);
  X2 << 6.0, 8.0, 0.0, 0.0;
  Eigen::VectorXd y2(2);
  y2 << 1.0, 0.0;
  const TimeSeriesDataset data2{y2, X2, names(2)};
  const auto grid0 =
      lambda_grid(data2, make_spec(0, 0.0, GroupStructure::single_group("g", 2)), 1);
  CHECK(grid0[0] == doctest::Approx(5.0));
}

TEST_CASE("cv folds are contiguous equal blocks") {
  Rng rng(71);
  const int T = 100, p = 3;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    y(t) = rng.gaussian();
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
  }
  const TimeSeriesDataset data{y, X, names(p)};
  const auto cv = cv_select(data, GroupStructure::singletons(names(p)), 1.0, 10);
  REQUIRE(cv.fold_boundaries.size() == 10);
  for (int f = 0; f < 10; ++f) {
    CHECK(cv.fold_boundaries[f].first == 10 * f);
    CHECK(cv.fold_boundaries[f].second == 10 * (f + 1));
  }
  CHECK(cv.cv_errors.rows() == static_cast<Eigen::Index>(cv.lambda_grid.size()));
  CHECK(cv.cv_errors.cols() == 10);
  CHECK(cv.selected_lambda == cv.lambda_grid[static_cast<size_t>(cv.selected_index)]);
}

TEST_CASE("cv on pure noise selects heavy regularization") {
  SolverSettings settings;
  settings.grid_size = 30;
  int in_top_decile = 0;
  const int runs = 50;
  for (int run = 0; run < runs; ++run) {
    Rng rng(100 + run);
    const int T = 100, p = 10;
    Eigen::MatrixXd X(T, p);
    Eigen::VectorXd y(T);
    for (int t = 0; t < T; ++t) {
      y(t) = rng.gaussian();
      for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
    }
    const TimeSeriesDataset data{y, X, names(p)};
    const auto cv = cv_select(data, GroupStructure::singletons(names(p)), 1.0, 10, {}, settings);
    if (cv.selected_index < 3) ++in_top_decile;  // top decile of a 30-point grid
  }
  CHECK(in_top_decile >= 45);
}

TEST_CASE("cv with a strong signal recovers the support") {
  SolverSettings settings;
  settings.grid_size = 30;
  int recovered = 0;
  const int runs = 50;
  for (int run = 0; run < runs; ++run) {
    Rng rng(300 + run);
    const int T = 80, p = 8;
    Eigen::MatrixXd X(T, p);
    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta(0) = 4.0;
    beta(3) = -4.0;
    beta(5) = 4.0;
    Eigen::VectorXd y = X * beta;
    for (int t = 0; t < T; ++t) y(t) += 0.1 * rng.gaussian();
    const TimeSeriesDataset data{y, X, names(p)};
    const auto cv = cv_select(data, GroupStructure::singletons(names(p)), 1.0, 10, {}, settings);
    PenaltySpec spec = make_spec(cv.selected_lambda, 1.0, GroupStructure::singletons(names(p)));
    const auto fit = fit_sglasso(data, spec);
    if (fit.beta(0) != 0.0 && fit.beta(3) != 0.0 && fit.beta(5) != 0.0) ++recovered;
  }
  CHECK(recovered >= 45);
}

TEST_CASE("cv rejects undersized folds") {
  Rng rng(83);
  const int T = 12, p = 2;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    y(t) = rng.gaussian();
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
  }
  const TimeSeriesDataset data{y, X, names(p)};
  CHECK_THROWS_AS(cv_select(data, GroupStructure::singletons(names(p)), 1.0, 7), ConfigError);
  CHECK_THROWS_AS(cv_select(data, GroupStructure::singletons(names(p)), 1.0, 1), ConfigError);
}

TEST_CASE("warm starts do not change the solution") {
  Rng rng(89);
  const int T = 60, p = 5;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    y(t) = rng.gaussian();
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
  }
  const TimeSeriesDataset data{y, X, names(p)};
  const PenaltySpec spec = make_spec(0.05, 1.0, GroupStructure::singletons(names(p)));
  const auto cold = fit_sglasso(data, spec);
  Eigen::VectorXd start = Eigen::VectorXd::Constant(p, 0.7);
  const auto warm = fit_sglasso(data, spec, {}, &start);
  CHECK((cold.beta - warm.beta).lpNorm<Eigen::Infinity>() < 1e-7);
}

}  // TEST_SUITE
