#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hdgc::cli {

struct SolverOptions {
  double tol = 1e-8;
  int max_cycles = 100000;
  double kkt_tol = 1e-7;
  int grid_size = 50;
  double grid_min_ratio = 1e-4;
};

/// Options shared by the commands that read a CSV and fit a model.
struct ModelOptions {
  std::string data_path;
  std::string response;
  std::string groups_path;  // optional JSON sidecar: {"group": ["col", ...]}
  double alpha = 1.0;
  std::optional<double> lambda;  // fixed penalty skips cross-validation
  int folds = 10;
  int ylags = 0;
  int horizon = 1;
  std::vector<std::string> midas_groups;
  int legendre_degree = 3;
  bool standardize = true;
  bool sqrt_group_weights = false;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

struct FitOptions {
  ModelOptions model;
  std::string out;  // empty writes to stdout
};

struct GrangerOptions {
  ModelOptions model;
  std::vector<std::string> test_groups;
  std::vector<double> mt_grid = {20.0, 40.0, 60.0};
  std::vector<std::string> kernels = {"parzen"};
  std::string out;
};

struct NodewiseOptions {
  ModelOptions model;
  std::vector<std::string> targets;  // group names; empty = every column
  std::string out;
};

struct SimulateOptions {
  int T = 1000;
  int p = 10;
  double rho = 0.6;
  int n_active = 5;
  int N = 500;
  std::vector<double> mt_grid = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60};
  std::string kernel = "parzen";
  double alpha = 1.0;
  int folds = 10;
  std::uint64_t seed = 1;
  bool redraw_beta = true;
  bool standardize = false;
  int threads = 0;
  SolverOptions solver;
  std::string out_prefix;  // writes <prefix>.csv and <prefix>.meta.json
};

void cmd_fit(const FitOptions& options);
void cmd_granger(const GrangerOptions& options);
void cmd_nodewise(const NodewiseOptions& options);
void cmd_simulate(const SimulateOptions& options);

/// Ordered group sidecar: a JSON object mapping group name to column names.
std::vector<std::pair<std::string, std::vector<std::string>>> load_group_spec(
    const std::string& path);

}  // namespace hdgc::cli
