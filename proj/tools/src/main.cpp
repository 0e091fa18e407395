#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "hdgc/errors.hpp"
#include "hdgc_cli/commands.hpp"
#include "hdgc_cli/kv_config.hpp"

namespace {

using namespace hdgc::cli;

// Solver/CV keys accepted in a --config key-value file; explicit flags win.
void apply_solver_config(const std::map<std::string, std::string>& kv, SolverOptions& solver,
                         double& alpha, int& folds) {
  kv_check_known(kv, {"tol", "max_cycles", "kkt_tol", "alpha", "n_folds", "grid_size",
                      "grid_min_ratio"});
  solver.tol = kv_double(kv, "tol", solver.tol);
  solver.max_cycles = kv_int(kv, "max_cycles", solver.max_cycles);
  solver.kkt_tol = kv_double(kv, "kkt_tol", solver.kkt_tol);
  solver.grid_size = kv_int(kv, "grid_size", solver.grid_size);
  solver.grid_min_ratio = kv_double(kv, "grid_min_ratio", solver.grid_min_ratio);
  alpha = kv_double(kv, "alpha", alpha);
  folds = kv_int(kv, "n_folds", folds);
}

void add_model_flags(CLI::App* cmd, ModelOptions& model, std::string& config_path,
                     double& lambda_value, bool& lambda_set) {
  cmd->add_option("--data", model.data_path, "input CSV (header row, date in column 1)")
      ->required();
  cmd->add_option("--response", model.response, "response column name")->required();
  cmd->add_option("--groups", model.groups_path, "JSON group spec: {\"group\": [columns]}");
  cmd->add_option("--alpha", model.alpha, "penalty mix: 1 = LASSO, 0 = group LASSO");
  auto* lam = cmd->add_option("--lambda", lambda_value, "fixed penalty (skips CV)");
  lam->each([&lambda_set](const std::string&) { lambda_set = true; });
  cmd->add_option("--folds", model.folds, "cross-validation folds");
  cmd->add_option("--ylags", model.ylags, "own response lags to include");
  cmd->add_option("--horizon", model.horizon, "steps ahead for the response");
  cmd->add_option("--midas-group", model.midas_groups,
                  "group to aggregate as a high-frequency lag block (repeatable)");
  cmd->add_option("--legendre-degree", model.legendre_degree, "MIDAS dictionary degree");
  cmd->add_flag("--standardize,!--no-standardize", model.standardize,
                "demean the response and scale covariates to unit sd");
  cmd->add_flag("--sqrt-group-weights", model.sqrt_group_weights,
                "weight group norms by sqrt(group size)");
  cmd->add_option("--seed", model.seed, "seed recorded in the report");
  cmd->add_option("--config", config_path, "key-value solver config file");
  cmd->add_option("--tol", model.solver.tol, "coefficient-change tolerance");
  cmd->add_option("--max-cycles", model.solver.max_cycles, "solver cycle cap");
  cmd->add_option("--grid-size", model.solver.grid_size, "lambda path length");
  cmd->add_option("--grid-min-ratio", model.solver.grid_min_ratio,
                  "smallest lambda as a fraction of lambda_max");
}

void finalize_model(ModelOptions& model, const std::string& config_path, double lambda_value,
                    bool lambda_set, const CLI::App* cmd) {
  if (!config_path.empty()) {
    SolverOptions from_file = model.solver;
    double alpha = model.alpha;
    int folds = model.folds;
    apply_solver_config(load_kv_config(config_path), from_file, alpha, folds);
    // Explicit flags take precedence over the config file.
    if (cmd->count("--tol") == 0) model.solver.tol = from_file.tol;
    if (cmd->count("--max-cycles") == 0) model.solver.max_cycles = from_file.max_cycles;
    if (cmd->count("--grid-size") == 0) model.solver.grid_size = from_file.grid_size;
    if (cmd->count("--grid-min-ratio") == 0) {
      model.solver.grid_min_ratio = from_file.grid_min_ratio;
    }
    model.solver.kkt_tol = from_file.kkt_tol;
    if (cmd->count("--alpha") == 0) model.alpha = alpha;
    if (cmd->count("--folds") == 0) model.folds = folds;
  }
  if (lambda_set) model.lambda = lambda_value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Debiased sparse-group LASSO inference and Granger causality tests "
               "for high-dimensional time series"};
  app.require_subcommand(1);

  FitOptions fit;
  std::string fit_config;
  double fit_lambda = 0.0;
  bool fit_lambda_set = false;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit an sg-LASSO regression");
  fit.model.horizon = 0;
  add_model_flags(fit_cmd, fit.model, fit_config, fit_lambda, fit_lambda_set);
  fit_cmd->add_option("--out", fit.out, "report path (default: stdout)");

  GrangerOptions granger;
  std::string granger_config;
  double granger_lambda = 0.0;
  bool granger_lambda_set = false;
  CLI::App* granger_cmd =
      app.add_subcommand("granger", "Wald tests for groups over a bandwidth/kernel grid");
  add_model_flags(granger_cmd, granger.model, granger_config, granger_lambda,
                  granger_lambda_set);
  granger_cmd->add_option("--test-group", granger.test_groups, "group to test (repeatable)")
      ->required();
  granger_cmd->add_option("--mt", granger.mt_grid, "bandwidth M_T (repeatable)");
  granger_cmd->add_option("--kernel", granger.kernels,
                          "kernel: parzen, qs, bartlett (repeatable)");
  granger_cmd->add_option("--out", granger.out, "report path (default: stdout)");

  NodewiseOptions nodewise;
  std::string nodewise_config;
  double nodewise_lambda = 0.0;
  bool nodewise_lambda_set = false;
  CLI::App* nodewise_cmd =
      app.add_subcommand("nodewise", "precision-matrix rows by nodewise LASSO");
  add_model_flags(nodewise_cmd, nodewise.model, nodewise_config, nodewise_lambda,
                  nodewise_lambda_set);
  nodewise_cmd->add_option("--test-group", nodewise.targets,
                           "restrict to these groups' columns (repeatable)");
  nodewise_cmd->add_option("--out", nodewise.out, "report path (default: stdout)");

  SimulateOptions simulate;
  std::string simulate_config;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "coverage experiment on the AR(1) design");
  simulate_cmd->add_option("--config", simulate_config, "key-value experiment config");
  simulate_cmd->add_option("--T", simulate.T, "sample size");
  simulate_cmd->add_option("--p", simulate.p, "covariate count");
  simulate_cmd->add_option("--rho", simulate.rho, "AR(1) persistence");
  simulate_cmd->add_option("--n-active", simulate.n_active, "nonzero coefficients");
  simulate_cmd->add_option("--N", simulate.N, "replications");
  simulate_cmd->add_option("--mt", simulate.mt_grid, "bandwidth grid (repeatable)");
  simulate_cmd->add_option("--kernel", simulate.kernel, "kernel name");
  simulate_cmd->add_option("--alpha", simulate.alpha, "penalty mix");
  simulate_cmd->add_option("--folds", simulate.folds, "cross-validation folds");
  simulate_cmd->add_option("--seed", simulate.seed, "master seed");
  simulate_cmd->add_flag("--redraw-beta,!--freeze-beta", simulate.redraw_beta,
                         "draw a fresh beta each replication");
  simulate_cmd->add_flag("--standardize", simulate.standardize,
                         "standardize each simulated dataset before fitting");
  simulate_cmd->add_option("--threads", simulate.threads, "worker threads (0 = auto)");
  simulate_cmd->add_option("--grid-size", simulate.solver.grid_size, "lambda path length");
  simulate_cmd->add_option("--out", simulate.out_prefix, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*fit_cmd) {
      finalize_model(fit.model, fit_config, fit_lambda, fit_lambda_set, fit_cmd);
      cmd_fit(fit);
    } else if (*granger_cmd) {
      finalize_model(granger.model, granger_config, granger_lambda, granger_lambda_set,
                     granger_cmd);
      cmd_granger(granger);
    } else if (*nodewise_cmd) {
      finalize_model(nodewise.model, nodewise_config, nodewise_lambda, nodewise_lambda_set,
                     nodewise_cmd);
      cmd_nodewise(nodewise);
    } else if (*simulate_cmd) {
      if (!simulate_config.empty()) {
        const auto kv = load_kv_config(simulate_config);
        kv_check_known(kv, {"T", "p", "rho", "n_active", "N", "mt_grid", "kernel", "alpha",
                            "seed", "folds", "threads", "redraw_beta", "standardize", "tol",
                            "max_cycles", "grid_size", "grid_min_ratio"});
        if (simulate_cmd->count("--T") == 0) simulate.T = kv_int(kv, "T", simulate.T);
        if (simulate_cmd->count("--p") == 0) simulate.p = kv_int(kv, "p", simulate.p);
        if (simulate_cmd->count("--rho") == 0) simulate.rho = kv_double(kv, "rho", simulate.rho);
        if (simulate_cmd->count("--n-active") == 0) {
          simulate.n_active = kv_int(kv, "n_active", simulate.n_active);
        }
        if (simulate_cmd->count("--N") == 0) simulate.N = kv_int(kv, "N", simulate.N);
        if (simulate_cmd->count("--mt") == 0) {
          simulate.mt_grid = kv_double_list(kv, "mt_grid", simulate.mt_grid);
        }
        if (simulate_cmd->count("--kernel") == 0) {
          simulate.kernel = kv_string(kv, "kernel", simulate.kernel);
        }
        if (simulate_cmd->count("--alpha") == 0) {
          simulate.alpha = kv_double(kv, "alpha", simulate.alpha);
        }
        if (simulate_cmd->count("--seed") == 0) {
          simulate.seed = static_cast<std::uint64_t>(kv_long(kv, "seed",
              static_cast<long long>(simulate.seed)));
        }
        if (simulate_cmd->count("--folds") == 0) simulate.folds = kv_int(kv, "folds", simulate.folds);
        if (simulate_cmd->count("--threads") == 0) {
          simulate.threads = kv_int(kv, "threads", simulate.threads);
        }
        if (simulate_cmd->count("--redraw-beta") == 0 &&
            simulate_cmd->count("--freeze-beta") == 0) {
          simulate.redraw_beta = kv_bool(kv, "redraw_beta", simulate.redraw_beta);
        }
        if (simulate_cmd->count("--standardize") == 0) {
          simulate.standardize = kv_bool(kv, "standardize", simulate.standardize);
        }
        simulate.solver.tol = kv_double(kv, "tol", simulate.solver.tol);
        simulate.solver.max_cycles = kv_int(kv, "max_cycles", simulate.solver.max_cycles);
        if (simulate_cmd->count("--grid-size") == 0) {
          simulate.solver.grid_size = kv_int(kv, "grid_size", simulate.solver.grid_size);
        }
        simulate.solver.grid_min_ratio =
            kv_double(kv, "grid_min_ratio", simulate.solver.grid_min_ratio);
      }
      cmd_simulate(simulate);
    }
  } catch (const hdgc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hdgc::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const hdgc::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
