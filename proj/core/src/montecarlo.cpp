#include "hdgc/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "hdgc/errors.hpp"
#include "hdgc/inference.hpp"
#include "hdgc/nodewise.hpp"
#include "hdgc/rng.hpp"

namespace hdgc {

namespace {

constexpr double kCritical = 1.96;  // tabulated critical value used by the coverage formulas

void validate_dgp(const DgpConfig& config) {
  if (config.T < 4) throw ConfigError("DGP needs T >= 4");
  if (config.p < 1) throw ConfigError("DGP needs p >= 1");
  if (!(config.rho > -1.0 && config.rho < 1.0)) {
    throw ConfigError("rho must lie in (-1, 1) for a stationary AR(1)");
  }
  if (config.n_active < 0 || config.n_active > config.p) {
    throw ConfigError("n_active must lie in [0, p]");
  }
  if (!(config.beta_max >= config.beta_min)) throw ConfigError("empty beta support");
}

// Running compensated (Kahan) sum.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

std::pair<TimeSeriesDataset, Eigen::VectorXd> simulate_dgp(const DgpConfig& config,
                                                           const Eigen::VectorXd* beta_fixed) {
  validate_dgp(config);
  Rng rng(config.seed);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(config.p);
  if (beta_fixed != nullptr) {
    if (beta_fixed->size() != config.p) throw DimensionError("fixed beta has the wrong length");
    beta = *beta_fixed;
  } else {
    for (int j = 0; j < config.n_active; ++j) {
      beta(j) = rng.uniform(config.beta_min, config.beta_max);
    }
  }

  const double stationary_sd = 1.0 / std::sqrt(1.0 - config.rho * config.rho);
  auto ar1_path = [&](Eigen::VectorXd& out) {
    out(0) = stationary_sd * rng.gaussian();
    for (int t = 1; t < config.T; ++t) {
      out(t) = config.rho * out(t - 1) + rng.gaussian();
    }
  };

  TimeSeriesDataset data;
  data.X.resize(config.T, config.p);
  data.column_names.reserve(static_cast<size_t>(config.p));
  Eigen::VectorXd path(config.T);
  for (int j = 0; j < config.p; ++j) {
    ar1_path(path);
    data.X.col(j) = path;
    data.column_names.push_back("x" + std::to_string(j + 1));
  }
  Eigen::VectorXd u(config.T);
  ar1_path(u);
  data.y = data.X * beta + u;
  return {std::move(data), std::move(beta)};
}

ReplicationResult run_replication(const DgpConfig& config, const ReplicationSettings& settings,
                                  const Eigen::VectorXd* beta_fixed) {
  if (settings.mt_grid.empty()) throw ConfigError("bandwidth grid is empty");
  for (double mt : settings.mt_grid) {
    if (!(mt > 0.0)) throw ConfigError("bandwidths must be positive");
  }

  auto [data, beta_true] = simulate_dgp(config, beta_fixed);

  ReplicationResult result;
  result.beta_true = beta_true;
  const int n_mt = static_cast<int>(settings.mt_grid.size());
  result.pivots.setConstant(n_mt, config.p, std::numeric_limits<double>::quiet_NaN());
  result.ci_lengths.setConstant(n_mt, config.p, std::numeric_limits<double>::quiet_NaN());

  try {
    TimeSeriesDataset work = data;
    Eigen::VectorXd target = beta_true;
    if (settings.standardize) {
      auto [std_data, record] = standardize(data);
      work = std::move(std_data);
      // Coefficients in the standardized model are scaled by the column sd.
      target = beta_true.cwiseProduct(record.column_sds);
    }

    const GroupStructure groups = GroupStructure::singletons(work.column_names);
    const CvResult cv =
        cv_select(work, groups, settings.alpha, settings.n_folds, {}, settings.solver);
    PenaltySpec spec;
    spec.lambda = cv.selected_lambda;
    spec.alpha = settings.alpha;
    spec.groups = groups;
    const SgLassoFit fit = fit_sglasso(work, spec, settings.solver);
    result.converged = fit.converged;
    result.beta_hat = fit.beta;

    std::vector<int> all(static_cast<size_t>(config.p));
    for (int j = 0; j < config.p; ++j) all[static_cast<size_t>(j)] = j;
    const PrecisionEstimate prec =
        estimate_precision_rows(work, all, {}, settings.n_folds, settings.solver);
    const DebiasedEstimate est = debias(fit, prec, work);
    result.debiased = est.beta_debiased;

    const Eigen::MatrixXd scores = score_series(fit.residuals, work, prec);
    const double Td = static_cast<double>(config.T);
    for (int m = 0; m < n_mt; ++m) {
      const KernelSpec kernel{settings.kernel, settings.mt_grid[static_cast<size_t>(m)]};
      const LongRunVariance lrv = hac_estimate(scores, kernel, all);
      for (int j = 0; j < config.p; ++j) {
        const double v = lrv.xi(j, j);
        if (!(v > 0.0)) {
          throw NumericError("long-run variance entry " + std::to_string(j) +
                             " is not positive");
        }
        const double se = std::sqrt(v / Td);
        result.pivots(m, j) = (est.beta_debiased(j) - target(j)) / se;
        result.ci_lengths(m, j) = 2.0 * kCritical * se;
      }
    }
  } catch (const NumericError& e) {
    result.valid = false;
    result.note = e.what();
  }
  return result;
}

CoverageTable aggregate_coverage(const std::vector<ReplicationResult>& replications,
                                 const std::vector<double>& mt_grid, int T, int p) {
  if (replications.empty()) throw ConfigError("no replications to aggregate");
  const int n_mt = static_cast<int>(mt_grid.size());

  std::vector<const ReplicationResult*> valid;
  valid.reserve(replications.size());
  for (const auto& rep : replications) {
    if (!rep.valid) continue;
    if (rep.pivots.rows() != n_mt || rep.pivots.cols() != p) {
      throw DimensionError("replication shape does not match the bandwidth grid");
    }
    valid.push_back(&rep);
  }
  if (valid.empty()) throw NumericError("every replication failed; nothing to aggregate");
  const double N = static_cast<double>(valid.size());

  CoverageTable table;
  table.n_reps = static_cast<int>(valid.size());
  table.rows.reserve(static_cast<size_t>(n_mt));

  for (int m = 0; m < n_mt; ++m) {
    // Per-coordinate coverage and average length, then averaged over the
    // active and inactive sets.
    KahanSum cov_active, cov_inactive, len_active, len_inactive;
    int n_active = 0, n_inactive = 0;
    for (int j = 0; j < p; ++j) {
      long covered = 0;
      KahanSum length;
      for (const ReplicationResult* rep : valid) {
        if (std::abs(rep->pivots(m, j)) <= kCritical) ++covered;
        length.add(rep->ci_lengths(m, j));
      }
      const double avcov_j = static_cast<double>(covered) / N;
      const double length_j = length.sum / N;
      const bool active = valid.front()->beta_true(j) != 0.0;
      if (active) {
        cov_active.add(avcov_j);
        len_active.add(length_j);
        ++n_active;
      } else {
        cov_inactive.add(avcov_j);
        len_inactive.add(length_j);
        ++n_inactive;
      }
    }
    CoverageRow row;
    row.mt = mt_grid[static_cast<size_t>(m)];
    row.p = p;
    row.T = T;
    row.avcov_active = n_active > 0 ? cov_active.sum / n_active : std::nan("");
    row.avcov_inactive = n_inactive > 0 ? cov_inactive.sum / n_inactive : std::nan("");
    row.length_active = n_active > 0 ? len_active.sum / n_active : std::nan("");
    row.length_inactive = n_inactive > 0 ? len_inactive.sum / n_inactive : std::nan("");
    table.rows.push_back(row);
  }
  return table;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.n_reps < 1) throw ConfigError("need at least one replication");
  validate_dgp(config.dgp);

  Eigen::VectorXd frozen_beta;
  const Eigen::VectorXd* beta_ptr = nullptr;
  if (!config.redraw_beta) {
    DgpConfig once = config.dgp;
    once.seed = derive_seed(config.dgp.seed, 0);
    frozen_beta = simulate_dgp(once).second;
    beta_ptr = &frozen_beta;
  }

  if (config.rep.mt_grid.empty()) throw ConfigError("bandwidth grid is empty");
  for (double mt : config.rep.mt_grid) {
    if (!(mt > 0.0)) throw ConfigError("bandwidths must be positive");
  }

  ExperimentResult result;
  result.replications.resize(static_cast<size_t>(config.n_reps));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= config.n_reps) break;
      DgpConfig dgp = config.dgp;
      dgp.seed = derive_seed(config.dgp.seed, static_cast<std::uint64_t>(rep) + 1);
      try {
        result.replications[static_cast<size_t>(rep)] =
            run_replication(dgp, config.rep, beta_ptr);
      } catch (const std::exception& e) {
        ReplicationResult failed;
        failed.valid = false;
        failed.note = e.what();
        failed.beta_true = Eigen::VectorXd::Zero(config.dgp.p);
        result.replications[static_cast<size_t>(rep)] = std::move(failed);
      }
    }
  };

  int n_threads = config.threads > 0
                      ? config.threads
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min(n_threads, config.n_reps);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& rep : result.replications) {
    if (!rep.valid) ++result.n_failed;
    if (rep.valid && !rep.converged) ++result.n_nonconverged;
  }
  result.table = aggregate_coverage(result.replications, config.rep.mt_grid, config.dgp.T,
                                    config.dgp.p);
  return result;
}

}  // namespace hdgc
