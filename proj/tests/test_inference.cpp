#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdgc/dataset.hpp"
#include "hdgc/distributions.hpp"
#include "hdgc/errors.hpp"
#include "hdgc/inference.hpp"
#include "hdgc/montecarlo.hpp"
#include "hdgc/rng.hpp"
#include "oracles.hpp"

using namespace hdgc;

namespace {

std::vector<std::string> names(int p) {
  std::vector<std::string> out;
  for (int j = 0; j < p; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

LongRunVariance make_lrv(Eigen::MatrixXd xi) {
  LongRunVariance lrv;
  lrv.xi = std::move(xi);
  lrv.kernel = KernelSpec{KernelKind::parzen, 20.0};
  for (Eigen::Index j = 0; j < lrv.xi.rows(); ++j) lrv.group.push_back(static_cast<int>(j));
  return lrv;
}

DebiasedEstimate make_estimate(Eigen::VectorXd values) {
  DebiasedEstimate est;
  est.beta_debiased = std::move(values);
  est.bias_correction = Eigen::VectorXd::Zero(est.beta_debiased.size());
  for (Eigen::Index j = 0; j < est.beta_debiased.size(); ++j) {
    est.group.push_back(static_cast<int>(j));
  }
  return est;
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("perfect fit has zero bias correction") {
  Rng rng(3);
  const int T = 40, p = 3;
  Eigen::MatrixXd X(T, p);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
  }
  Eigen::VectorXd beta(p);
  beta << 1.0, -2.0, 0.5;
  const TimeSeriesDataset data{X * beta, X, names(p)};

  SgLassoFit fit;
  fit.beta = beta;
  fit.residuals = Eigen::VectorXd::Zero(T);
  const PrecisionEstimate prec =
      PrecisionEstimate::from_matrix({0, 1, 2}, Eigen::MatrixXd::Identity(p, p));
  const DebiasedEstimate est = debias(fit, prec, data);
  CHECK(est.bias_correction.cwiseAbs().maxCoeff() == 0.0);
  CHECK((est.beta_debiased - beta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exact precision turns any fit into OLS") {
  Rng rng(7);
  const int T = 120, p = 5;
  Eigen::MatrixXd X(T, p);
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t) {
    y(t) = rng.gaussian();
    for (int j = 0; j < p; ++j) X(t, j) = rng.gaussian();
  }
  const TimeSeriesDataset data{y, X, names(p)};
  const Eigen::MatrixXd sigma = X.transpose() * X / T;
  const Eigen::MatrixXd theta = sigma.inverse();
  const Eigen::VectorXd ols = sigma.ldlt().solve(X.transpose() * y / T);

  // The one-step correction lands on OLS regardless of the initial fit.
  SgLassoFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  fit.beta(0) = 0.7;
  fit.beta(3) = -1.1;
  fit.residuals = y - X * fit.beta;
  std::vector<int> G{0, 1, 2, 3, 4};
  const DebiasedEstimate est = debias(fit, PrecisionEstimate::from_matrix(G, theta), data);
  CHECK((est.beta_debiased - ols).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("pivot arithmetic") {
  const DebiasedEstimate est = make_estimate((Eigen::VectorXd(1) << 1.4).finished());
  Eigen::MatrixXd xi(1, 1);
  xi << 4.0;
  const LongRunVariance lrv = make_lrv(xi);
  CHECK(pivot(est, lrv, 0, 1.4, 100) == 0.0);
  CHECK(pivot(est, lrv, 0, 1.0, 100) == doctest::Approx(2.0).epsilon(1e-12));

  Eigen::MatrixXd zero(1, 1);
  zero << 0.0;
  CHECK_THROWS_AS(pivot(est, make_lrv(zero), 0, 0.0, 100), NumericError);
}

TEST_CASE("confidence interval width") {
  const DebiasedEstimate est = make_estimate((Eigen::VectorXd(1) << 0.25).finished());
  Eigen::MatrixXd xi(1, 1);
  xi << 1.0;
  const auto [lo, hi] = confidence_interval(est, make_lrv(xi), 0, 10000, 0.95);
  CHECK(hi > lo);
  CHECK(0.5 * (lo + hi) == doctest::Approx(0.25));
  // Half-width is the exact 0.975 quantile times 0.01.
  CHECK(hi - lo == doctest::Approx(2.0 * normal_quantile(0.975) * 0.01).epsilon(1e-12));
  CHECK(hi - lo == doctest::Approx(0.0392).epsilon(1e-3));

  Eigen::MatrixXd zero(1, 1);
  zero << 0.0;
  CHECK_THROWS_AS(confidence_interval(est, make_lrv(zero), 0, 10000, 0.95), NumericError);
}

TEST_CASE("wald statistic of a zero estimate is zero") {
  const DebiasedEstimate est = make_estimate(Eigen::VectorXd::Zero(3));
  Eigen::MatrixXd xi = Eigen::MatrixXd::Identity(3, 3);
  const GrangerTestResult result =
      wald_test(est, make_lrv(xi), Eigen::MatrixXd::Identity(3, 3), 500);
  CHECK(result.wald_stat == 0.0);
  CHECK(result.p_value == 1.0);
  CHECK(result.dof == 3);
  CHECK(result.ci_per_coordinate.size() == 3);
  for (const auto& [lo, hi] : result.ci_per_coordinate) CHECK(hi > lo);
}

TEST_CASE("scalar wald equals the squared pivot") {
  Rng rng(11);
  for (int rep = 0; rep < 25; ++rep) {
    const double d = rng.gaussian();
    const double v = 0.2 + rng.uniform() * 3.0;
    const int T = 100 + static_cast<int>(rng.uniform() * 900.0);
    const DebiasedEstimate est = make_estimate((Eigen::VectorXd(1) << d).finished());
    Eigen::MatrixXd xi(1, 1);
    xi << v;
    const LongRunVariance lrv = make_lrv(xi);
    const double z = pivot(est, lrv, 0, 0.0, T);
    const GrangerTestResult result = wald_test(est, lrv, Eigen::MatrixXd::Identity(1, 1), T);
    CHECK(result.wald_stat == doctest::Approx(z * z).epsilon(1e-10));
    // chi2_1 tail equals the two-sided normal tail.
    CHECK(result.p_value == doctest::Approx(2.0 * (1.0 - normal_cdf(std::abs(z)))).epsilon(1e-8));
  }
}

TEST_CASE("generalized inverse contract on full-rank restrictions") {
  Rng rng(13);
  const int g = 4, r = 2;
  Eigen::MatrixXd A(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) A(i, j) = rng.gaussian();
  }
  const Eigen::MatrixXd xi = A * A.transpose() + Eigen::MatrixXd::Identity(g, g);
  Eigen::MatrixXd R(r, g);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < g; ++j) R(i, j) = rng.gaussian();
  }
  const Eigen::MatrixXd S = R * xi * R.transpose();

  // Reconstruct the pseudo-inverse the same way the test statistic does and
  // verify S^+ S = I.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    pinv += eig.eigenvectors().col(i) * eig.eigenvectors().col(i).transpose() /
            eig.eigenvalues()(i);
  }
  CHECK((pinv * S - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("wald statistic is invariant to row rescaling of the restrictions") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const int g = 5, r = 3;
    Eigen::MatrixXd A(g, g);
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) A(i, j) = rng.gaussian();
    }
    const Eigen::MatrixXd xi = A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(g, g);
    Eigen::MatrixXd R(r, g);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < g; ++j) R(i, j) = rng.gaussian();
    }
    Eigen::MatrixXd M(r, r);
    do {
      for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) M(i, j) = rng.gaussian();
      }
    } while (std::abs(M.determinant()) < 0.1);

    Eigen::VectorXd d(g);
    for (int i = 0; i < g; ++i) d(i) = rng.gaussian();
    const DebiasedEstimate est = make_estimate(d);
    const LongRunVariance lrv = make_lrv(xi);
    const double w1 = wald_test(est, lrv, R, 400).wald_stat;
    const double w2 = wald_test(est, lrv, (M * R).eval(), 400).wald_stat;
    CHECK(w1 == doctest::Approx(w2).epsilon(1e-6));
  }
}

TEST_CASE("p-values decrease in the statistic") {
  const DebiasedEstimate est = make_estimate(Eigen::VectorXd::Zero(2));
  Eigen::MatrixXd xi = Eigen::MatrixXd::Identity(2, 2);
  const LongRunVariance lrv = make_lrv(xi);
  double prev = 1.1;
  for (double scale : {0.02, 0.05, 0.1, 0.2, 0.3}) {
    DebiasedEstimate shifted = est;
    shifted.beta_debiased.setConstant(scale);
    const double pv = wald_test(shifted, lrv, Eigen::MatrixXd::Identity(2, 2), 300).p_value;
    CHECK(pv < prev);
    CHECK(pv > 0.0);
    prev = pv;
  }
}

TEST_CASE("rank-deficient restrictions name the redundant rows") {
  const DebiasedEstimate est = make_estimate(Eigen::VectorXd::Ones(3));
  Eigen::MatrixXd xi = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd R(3, 3);
  R << 1, 0, 0, 0, 1, 0, 1, 1, 0;  // row 2 = row 0 + row 1
  CHECK_THROWS_AS(wald_test(est, make_lrv(xi), R, 200), ConfigError);
}

TEST_CASE("singular variance reduces the reported rank") {
  const DebiasedEstimate est = make_estimate((Eigen::VectorXd(2) << 0.3, 0.3).finished());
  Eigen::MatrixXd xi(2, 2);
  xi << 1.0, 1.0, 1.0, 1.0;  // rank one
  const GrangerTestResult result =
      wald_test(est, make_lrv(xi), Eigen::MatrixXd::Identity(2, 2), 100);
  CHECK(result.dof == 1);
  CHECK(result.nominal_dof == 2);
  CHECK(result.p_value == doctest::Approx(chi2_sf(result.wald_stat, 1)));
}

TEST_CASE("debiasing reduces the shrinkage bias on the AR design") {
  // 60 replications of the simulation pipeline; the debiased estimate
  // should track the truth better than the penalized one on the active set.
  ExperimentConfig config;
  config.dgp.T = 400;
  config.dgp.p = 10;
  config.dgp.seed = 909;
  config.n_reps = 60;
  config.rep.mt_grid = {10.0};
  config.rep.solver.grid_size = 25;
  const ExperimentResult result = run_experiment(config);

  std::vector<double> raw_err, debiased_err;
  for (const auto& rep : result.replications) {
    if (!rep.valid) continue;
    for (int j = 0; j < config.dgp.p; ++j) {
      if (rep.beta_true(j) == 0.0) continue;
      raw_err.push_back(std::abs(rep.beta_hat(j) - rep.beta_true(j)));
      debiased_err.push_back(std::abs(rep.debiased(j) - rep.beta_true(j)));
    }
  }
  REQUIRE(raw_err.size() > 100);
  std::sort(raw_err.begin(), raw_err.end());
  std::sort(debiased_err.begin(), debiased_err.end());
  const double raw_median = raw_err[raw_err.size() / 2];
  const double debiased_median = debiased_err[debiased_err.size() / 2];
  CHECK(debiased_median < raw_median);
}

TEST_CASE("wald size and power on a moderate design") {
  // Compact version of the null/alternative experiment; the full-size run
  // lives in the acceptance suite.
  const int reps = 120;
  const int T = 400, p = 15;
  const std::vector<int> G{5, 6, 7};
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(3, 3);
  SolverSettings settings;
  settings.grid_size = 20;

  int null_rejections = 0, alt_rejections = 0;
  for (int rep = 0; rep < reps; ++rep) {
    for (const bool alternative : {false, true}) {
      DgpConfig dgp;
      dgp.T = T;
      dgp.p = p;
      dgp.seed = derive_seed(555, static_cast<std::uint64_t>(rep * 2 + alternative));
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
      {
        Rng rng(dgp.seed + 17);
        for (int j = 0; j < dgp.n_active; ++j) beta(j) = rng.uniform(0.0, 4.0);
      }
      if (alternative) {
        for (int j : G) beta(j) = 1.0;
      }
      auto [data, beta_true] = simulate_dgp(dgp, &beta);
      const GroupStructure groups = GroupStructure::singletons(data.column_names);
      const CvResult cv = cv_select(data, groups, 1.0, 10, {}, settings);
      PenaltySpec spec;
      spec.lambda = cv.selected_lambda;
      spec.groups = groups;
      const SgLassoFit fit = fit_sglasso(data, spec, settings);
      const PrecisionEstimate prec = estimate_precision_rows(data, G, {}, 10, settings);
      const DebiasedEstimate est = debias(fit, prec, data);
      const Eigen::MatrixXd scores = score_series(fit.residuals, data, prec);
      const LongRunVariance lrv = hac_estimate(scores, {KernelKind::parzen, 10.0}, G);
      const GrangerTestResult result = wald_test(est, lrv, R, T);
      if (result.p_value < 0.05) {
        (alternative ? alt_rejections : null_rejections) += 1;
      }
    }
  }
  const double size = static_cast<double>(null_rejections) / reps;
  const double power = static_cast<double>(alt_rejections) / reps;
  CHECK(size >= 0.0);
  CHECK(size <= 0.15);
  CHECK(power >= 0.9);
}

}  // TEST_SUITE
