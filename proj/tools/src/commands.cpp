#include "hdgc_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>

#include "hdgc/csv.hpp"
#include "hdgc/errors.hpp"
#include "hdgc/hac.hpp"
#include "hdgc/inference.hpp"
#include "hdgc/montecarlo.hpp"
#include "hdgc/nodewise.hpp"
#include "hdgc/sglasso.hpp"
#include "hdgc_cli/design.hpp"
#include "json.hpp"

namespace hdgc::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << std::endl;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text << "\n";
}

SolverSettings to_settings(const SolverOptions& options) {
  SolverSettings settings;
  settings.tol = options.tol;
  settings.max_cycles = options.max_cycles;
  settings.kkt_tol = options.kkt_tol;
  settings.grid_size = options.grid_size;
  settings.grid_min_ratio = options.grid_min_ratio;
  return settings;
}

json solver_json(const SolverOptions& options) {
  return json{{"tol", options.tol},
              {"max_cycles", options.max_cycles},
              {"kkt_tol", options.kkt_tol},
              {"grid_size", options.grid_size},
              {"grid_min_ratio", options.grid_min_ratio}};
}

json model_config_json(const ModelOptions& options) {
  json groups = json::array();
  // The group spec is re-read for the report so the run is re-executable
  // from its own output.
  json cfg{{"data", options.data_path},
           {"response", options.response},
           {"groups_file", options.groups_path},
           {"alpha", options.alpha},
           {"folds", options.folds},
           {"ylags", options.ylags},
           {"horizon", options.horizon},
           {"midas_groups", options.midas_groups},
           {"legendre_degree", options.legendre_degree},
           {"standardize", options.standardize},
           {"sqrt_group_weights", options.sqrt_group_weights},
           {"seed", options.seed},
           {"solver", solver_json(options.solver)}};
  if (options.lambda.has_value()) {
    cfg["lambda"] = *options.lambda;
  } else {
    cfg["lambda"] = nullptr;
  }
  return cfg;
}

struct FittedModel {
  AssembledDesign design;
  PenaltySpec spec;
  SgLassoFit fit;
  std::optional<CvResult> cv;
};

FittedModel fit_model(const ModelOptions& options) {
  if (options.data_path.empty()) throw ConfigError("--data is required");
  if (options.response.empty()) throw ConfigError("--response is required");
  if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) {
    throw ConfigError("--alpha must lie in [0, 1]");
  }
  if (options.lambda.has_value() && *options.lambda < 0.0) {
    throw ConfigError("--lambda must be >= 0");
  }

  const CsvTable table = load_csv(options.data_path);

  DesignOptions design_options;
  design_options.response = options.response;
  design_options.horizon = options.horizon;
  design_options.ylags = options.ylags;
  design_options.midas_groups = options.midas_groups;
  design_options.legendre_degree = options.legendre_degree;
  design_options.standardize = options.standardize;
  if (!options.groups_path.empty()) {
    design_options.group_spec = load_group_spec(options.groups_path);
  }

  FittedModel model;
  model.design = assemble_design(table, design_options);

  const SolverSettings settings = to_settings(options.solver);
  model.spec.alpha = options.alpha;
  model.spec.groups = model.design.groups;
  model.spec.sqrt_group_weights = options.sqrt_group_weights;
  if (options.lambda.has_value()) {
    model.spec.lambda = *options.lambda;
  } else {
    model.cv = cv_select(model.design.dataset, model.design.groups, options.alpha,
                         options.folds, {}, settings, options.sqrt_group_weights);
    model.spec.lambda = model.cv->selected_lambda;
  }
  model.fit = fit_sglasso(model.design.dataset, model.spec, settings);
  return model;
}

json cv_json(const CvResult& cv) {
  json folds = json::array();
  for (const auto& [begin, end] : cv.fold_boundaries) folds.push_back({begin, end});
  std::vector<double> mean(cv.mean_cv_error.data(), cv.mean_cv_error.data() + cv.mean_cv_error.size());
  return json{{"lambda_grid", cv.lambda_grid},
              {"mean_cv_error", mean},
              {"fold_boundaries", folds},
              {"selected_index", cv.selected_index}};
}

std::vector<int> group_indices(const AssembledDesign& design, const std::string& name) {
  const auto pos = design.groups.find(name);
  if (!pos.has_value()) {
    throw ConfigError("test group '" + name + "' is not in the group structure");
  }
  return design.groups.groups[static_cast<size_t>(*pos)].second;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

}  // namespace

std::vector<std::pair<std::string, std::vector<std::string>>> load_group_spec(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open group spec '" + path + "'");
  ordered_json spec;
  try {
    in >> spec;
  } catch (const std::exception& e) {
    throw DataError("group spec '" + path + "': " + e.what());
  }
  if (!spec.is_object()) throw DataError("group spec must be a JSON object");
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  for (const auto& [name, cols] : spec.items()) {
    if (!cols.is_array()) {
      throw DataError("group '" + name + "' must map to an array of column names");
    }
    std::vector<std::string> names;
    for (const auto& c : cols) {
      if (!c.is_string()) throw DataError("group '" + name + "' has a non-string column entry");
      names.push_back(c.get<std::string>());
    }
    groups.emplace_back(name, std::move(names));
  }
  return groups;
}

void cmd_fit(const FitOptions& options) {
  const FittedModel model = fit_model(options.model);

  json beta = json::object();
  for (Eigen::Index j = 0; j < model.fit.beta.size(); ++j) {
    if (model.fit.beta(j) != 0.0) {
      beta[model.design.dataset.column_names[static_cast<size_t>(j)]] = model.fit.beta(j);
    }
  }

  json report{{"command", "fit"},
              {"config", model_config_json(options.model)},
              {"selected_lambda", model.spec.lambda},
              {"cv", model.cv.has_value() ? cv_json(*model.cv) : json(nullptr)},
              {"beta", beta},
              {"n_nonzero", beta.size()},
              {"sigma2_hat", model.fit.sigma2_hat},
              {"objective_value", model.fit.objective_value},
              {"converged", model.fit.converged},
              {"iterations", model.fit.iterations},
              {"kkt_violation", kkt_violation(model.fit, model.design.dataset)},
              {"T", model.design.dataset.T()},
              {"p", model.design.dataset.p()},
              {"generated_at", utc_timestamp()}};
  write_text(options.out, report.dump(2));
}

void cmd_granger(const GrangerOptions& options) {
  if (options.test_groups.empty()) throw ConfigError("granger needs at least one --test-group");
  if (options.mt_grid.empty()) throw ConfigError("granger needs at least one --mt value");
  std::vector<KernelKind> kernels;
  if (options.kernels.empty()) throw ConfigError("granger needs at least one --kernel");
  for (const auto& name : options.kernels) kernels.push_back(kernel_from_name(name));

  const FittedModel model = fit_model(options.model);
  const TimeSeriesDataset& data = model.design.dataset;
  const Eigen::Index T = data.T();
  for (double mt : options.mt_grid) {
    if (!(mt > 0.0) || mt != std::floor(mt) || mt >= static_cast<double>(T)) {
      throw ConfigError("bandwidth " + std::to_string(mt) +
                        " must be a positive integer smaller than T = " + std::to_string(T));
    }
  }

  const SolverSettings settings = to_settings(options.model.solver);
  json tests = json::array();
  for (const std::string& name : options.test_groups) {
    const std::vector<int> G = group_indices(model.design, name);
    if (static_cast<Eigen::Index>(G.size()) >= data.p()) {
      throw ConfigError("test group '" + name + "' covers every column; no controls remain");
    }

    const PrecisionEstimate prec =
        estimate_precision_rows(data, G, {}, options.model.folds, settings);
    const DebiasedEstimate est = debias(model.fit, prec, data);
    const Eigen::MatrixXd scores = score_series(model.fit.residuals, data, prec);
    const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(G.size()),
                                                        static_cast<Eigen::Index>(G.size()));

    for (const KernelKind kind : kernels) {
      for (const double mt : options.mt_grid) {
        const LongRunVariance lrv = hac_estimate(scores, KernelSpec{kind, mt}, G);
        const GrangerTestResult result = wald_test(est, lrv, R, T);

        json coefficients = json::array();
        for (size_t i = 0; i < G.size(); ++i) {
          const int j = G[i];
          const double se = std::sqrt(lrv.xi(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(i)) /
                                      static_cast<double>(T));
          coefficients.push_back(
              {{"name", data.column_names[static_cast<size_t>(j)]},
               {"estimate", model.fit.beta(j)},
               {"debiased", est.beta_debiased(static_cast<Eigen::Index>(i))},
               {"se", se},
               {"ci_low", result.ci_per_coordinate[i].first},
               {"ci_high", result.ci_per_coordinate[i].second}});
        }
        tests.push_back({{"group_name", name},
                         {"bandwidth", mt},
                         {"kernel", kernel_name(kind)},
                         {"wald", result.wald_stat},
                         {"dof", result.dof},
                         {"nominal_dof", result.nominal_dof},
                         {"p_value", result.p_value},
                         {"significant_5pct", result.p_value < 0.05},
                         {"significant_1pct", result.p_value < 0.01},
                         {"per_coefficient", coefficients}});
      }
    }
  }

  json config = model_config_json(options.model);
  config["test_groups"] = options.test_groups;
  config["mt_grid"] = options.mt_grid;
  config["kernels"] = options.kernels;

  json report{{"command", "granger"},
              {"config", config},
              {"selected_lambda", model.spec.lambda},
              {"converged", model.fit.converged},
              {"tests", tests},
              {"generated_at", utc_timestamp()}};
  write_text(options.out, report.dump(2));
}

void cmd_nodewise(const NodewiseOptions& options) {
  const ModelOptions& mo = options.model;
  if (mo.data_path.empty()) throw ConfigError("--data is required");
  if (mo.response.empty()) throw ConfigError("--response is required");

  const CsvTable table = load_csv(mo.data_path);
  DesignOptions design_options;
  design_options.response = mo.response;
  design_options.horizon = mo.horizon;
  design_options.ylags = mo.ylags;
  design_options.midas_groups = mo.midas_groups;
  design_options.legendre_degree = mo.legendre_degree;
  design_options.standardize = mo.standardize;
  if (!mo.groups_path.empty()) design_options.group_spec = load_group_spec(mo.groups_path);
  const AssembledDesign design = assemble_design(table, design_options);

  std::vector<int> G;
  if (options.targets.empty()) {
    for (Eigen::Index j = 0; j < design.dataset.p(); ++j) G.push_back(static_cast<int>(j));
  } else {
    for (const std::string& name : options.targets) {
      for (int j : group_indices(design, name)) G.push_back(j);
    }
  }

  const SolverSettings settings = to_settings(mo.solver);
  std::vector<double> lambdas;
  if (mo.lambda.has_value()) lambdas.push_back(*mo.lambda);
  const PrecisionEstimate prec =
      estimate_precision_rows(design.dataset, G, lambdas, mo.folds, settings);

  json rows = json::array();
  for (const NodewiseRow& row : prec.detail()) {
    json gamma = json::object();
    Eigen::Index col = 0;
    for (Eigen::Index k = 0; k < design.dataset.p(); ++k) {
      if (static_cast<int>(k) == row.j) continue;
      if (row.gamma_hat(col) != 0.0) {
        gamma[design.dataset.column_names[static_cast<size_t>(k)]] = row.gamma_hat(col);
      }
      ++col;
    }
    rows.push_back({{"column", design.dataset.column_names[static_cast<size_t>(row.j)]},
                    {"index", row.j},
                    {"lambda_j", row.lambda_j},
                    {"sigma2_j", row.sigma2_j},
                    {"gamma", gamma}});
  }

  json config = model_config_json(mo);
  config["targets"] = options.targets;
  json report{{"command", "nodewise"},
              {"config", config},
              {"rows", rows},
              {"identity_defect", identity_defect(prec, design.dataset)},
              {"generated_at", utc_timestamp()}};
  write_text(options.out, report.dump(2));
}

void cmd_simulate(const SimulateOptions& options) {
  if (options.out_prefix.empty()) throw ConfigError("simulate needs --out <prefix>");
  if (options.N < 1) throw ConfigError("N must be >= 1");
  for (double mt : options.mt_grid) {
    if (!(mt > 0.0) || mt != std::floor(mt) || mt >= static_cast<double>(options.T)) {
      throw ConfigError("bandwidth " + std::to_string(mt) +
                        " must be a positive integer smaller than T");
    }
  }

  ExperimentConfig config;
  config.dgp.T = options.T;
  config.dgp.p = options.p;
  config.dgp.rho = options.rho;
  config.dgp.n_active = options.n_active;
  config.dgp.seed = options.seed;
  config.n_reps = options.N;
  config.rep.mt_grid = options.mt_grid;
  config.rep.kernel = kernel_from_name(options.kernel);
  config.rep.alpha = options.alpha;
  config.rep.n_folds = options.folds;
  config.rep.solver = to_settings(options.solver);
  config.rep.standardize = options.standardize;
  config.redraw_beta = options.redraw_beta;
  config.threads = options.threads;

  const ExperimentResult result = run_experiment(config);

  // Table rows mirror the coverage-table layout: one row per bandwidth with
  // the active/inactive coverage and length columns.
  std::string csv = "T,p,M_T,avcov_active,avcov_inactive,length_active,length_inactive\n";
  for (const CoverageRow& row : result.table.rows) {
    csv += std::to_string(row.T) + "," + std::to_string(row.p) + "," +
           format_fixed(row.mt, 0) + "," + format_fixed(row.avcov_active, 6) + "," +
           format_fixed(row.avcov_inactive, 6) + "," + format_fixed(row.length_active, 6) +
           "," + format_fixed(row.length_inactive, 6) + "\n";
  }
  {
    std::ofstream out(options.out_prefix + ".csv");
    if (!out) throw DataError("cannot write '" + options.out_prefix + ".csv'");
    out << csv;
  }

  json meta{{"command", "simulate"},
            {"config",
             {{"T", options.T},
              {"p", options.p},
              {"rho", options.rho},
              {"n_active", options.n_active},
              {"N", options.N},
              {"mt_grid", options.mt_grid},
              {"kernel", options.kernel},
              {"alpha", options.alpha},
              {"folds", options.folds},
              {"seed", options.seed},
              {"redraw_beta", options.redraw_beta},
              {"standardize", options.standardize},
              {"threads", options.threads},
              {"solver", solver_json(options.solver)}}},
            {"n_reps_aggregated", result.table.n_reps},
            {"n_nonconverged", result.n_nonconverged},
            {"n_failed", result.n_failed}};
  std::ofstream meta_out(options.out_prefix + ".meta.json");
  if (!meta_out) throw DataError("cannot write '" + options.out_prefix + ".meta.json'");
  meta_out << meta.dump(2) << "\n";
}

}  // namespace hdgc::cli
