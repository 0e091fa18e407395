#include "hdgc_cli/design.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hdgc/errors.hpp"
#include "hdgc/midas.hpp"

namespace hdgc::cli {

namespace {

// A covariate group before alignment: named columns of the working matrix.
struct PendingGroup {
  std::string name;
  std::vector<std::string> column_names;
  Eigen::MatrixXd columns;  // raw rows x |group|
};

Eigen::VectorXd standardized_column(const Eigen::VectorXd& col, const std::string& name) {
  const double mean = col.mean();
  Eigen::VectorXd centered = col.array() - mean;
  const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(col.size()));
  if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
    throw DataError("column '" + name + "' is constant; cannot standardize");
  }
  return centered / sd;
}

}  // namespace

AssembledDesign assemble_design(const CsvTable& table, const DesignOptions& options) {
  const int resp = table.column_index(options.response);
  if (resp < 0) {
    throw ConfigError("response column '" + options.response + "' is not in the data");
  }
  if (options.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (options.ylags < 0) throw ConfigError("ylags must be >= 0");
  if (options.ylags > 0 && options.horizon < 1) {
    throw ConfigError("own response lags need horizon >= 1, otherwise lag 1 is the target itself");
  }

  const Eigen::VectorXd y_full = table.values.col(resp);
  const Eigen::Index n_rows = table.rows();

  // Covariate columns and their group membership. Named groups keep the
  // spec order; leftovers become singletons in CSV order.
  std::map<std::string, int> covariate_index;
  for (size_t j = 0; j < table.column_names.size(); ++j) {
    if (static_cast<int>(j) == resp) continue;
    covariate_index[table.column_names[j]] = static_cast<int>(j);
  }

  std::vector<PendingGroup> pending;
  std::set<std::string> grouped;
  std::set<std::string> group_names;
  for (const auto& [name, cols] : options.group_spec) {
    if (!group_names.insert(name).second) {
      throw ConfigError("group '" + name + "' is declared twice");
    }
    if (cols.empty()) throw ConfigError("group '" + name + "' lists no columns");
    PendingGroup group;
    group.name = name;
    group.columns.resize(n_rows, static_cast<Eigen::Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) {
      auto it = covariate_index.find(cols[i]);
      if (it == covariate_index.end()) {
        throw ConfigError("group '" + name + "' references '" + cols[i] +
                          "', which is not a covariate column");
      }
      if (!grouped.insert(cols[i]).second) {
        throw ConfigError("column '" + cols[i] + "' appears in more than one group");
      }
      group.column_names.push_back(cols[i]);
      group.columns.col(static_cast<Eigen::Index>(i)) = table.values.col(it->second);
    }
    pending.push_back(std::move(group));
  }
  for (size_t j = 0; j < table.column_names.size(); ++j) {
    const std::string& name = table.column_names[j];
    if (static_cast<int>(j) == resp || grouped.count(name) > 0) continue;
    PendingGroup group;
    group.name = name;
    group.column_names.push_back(name);
    group.columns = table.values.col(static_cast<Eigen::Index>(j));
    pending.push_back(std::move(group));
  }

  // High-frequency lag blocks: per-lag standardization, then dictionary
  // aggregation into degree+1 coordinates.
  for (const std::string& name : options.midas_groups) {
    auto it = std::find_if(pending.begin(), pending.end(),
                           [&](const PendingGroup& g) { return g.name == name; });
    if (it == pending.end()) {
      throw ConfigError("MIDAS group '" + name + "' is not declared in the group spec");
    }
    const int L = static_cast<int>(it->columns.cols());
    Eigen::MatrixXd block(n_rows, L);
    for (int l = 0; l < L; ++l) {
      block.col(l) = standardized_column(it->columns.col(l), it->column_names[static_cast<size_t>(l)]);
    }
    const MidasDictionary dict = legendre_dictionary(options.legendre_degree, L);
    it->columns = aggregate_midas(block, dict);
    it->column_names.clear();
    for (int k = 0; k <= options.legendre_degree; ++k) {
      it->column_names.push_back(name + "_leg" + std::to_string(k));
    }
  }

  // Row alignment: target y[t + horizon] against row-t covariates and own
  // lags y[t], ..., y[t - ylags + 1].
  const int h = options.horizon;
  const int J = options.ylags;
  const Eigen::Index t_begin = J > 0 ? J - 1 : 0;
  const Eigen::Index t_end = n_rows - h;  // exclusive
  if (t_end - t_begin < 4) {
    throw DataError("only " + std::to_string(std::max<Eigen::Index>(t_end - t_begin, 0)) +
                    " usable rows after lag/horizon alignment");
  }
  const Eigen::Index T = t_end - t_begin;

  Eigen::Index p = J;
  for (const auto& group : pending) p += group.columns.cols();

  AssembledDesign design;
  design.dataset.y.resize(T);
  design.dataset.X.resize(T, p);
  design.target_dates.reserve(static_cast<size_t>(T));

  for (Eigen::Index i = 0; i < T; ++i) {
    const Eigen::Index t = t_begin + i;
    design.dataset.y(i) = y_full(t + h);
    design.target_dates.push_back(table.dates[static_cast<size_t>(t + h)]);
  }

  Eigen::Index col = 0;
  if (J > 0) {
    std::vector<int> idx;
    for (int l = 0; l < J; ++l) {
      for (Eigen::Index i = 0; i < T; ++i) {
        design.dataset.X(i, col) = y_full(t_begin + i - l);
      }
      design.dataset.column_names.push_back(options.response + "_lag" + std::to_string(l + 1));
      idx.push_back(static_cast<int>(col));
      ++col;
    }
    design.groups.groups.emplace_back(options.response + "_lags", std::move(idx));
  }
  for (const auto& group : pending) {
    std::vector<int> idx;
    for (Eigen::Index c = 0; c < group.columns.cols(); ++c) {
      design.dataset.X.col(col) = group.columns.col(c).segment(t_begin, T);
      design.dataset.column_names.push_back(group.column_names[static_cast<size_t>(c)]);
      idx.push_back(static_cast<int>(col));
      ++col;
    }
    design.groups.groups.emplace_back(group.name, std::move(idx));
  }

  validate_dataset(design.dataset);
  design.groups.validate(design.dataset.p());

  if (options.standardize) {
    auto [std_data, record] = standardize(design.dataset);
    design.dataset = std::move(std_data);
    design.record = std::move(record);
    design.standardized = true;
  }
  return design;
}

}  // namespace hdgc::cli
