#include "hdgc/hac.hpp"

#include <cmath>

#include "hdgc/errors.hpp"

namespace hdgc {

KernelKind kernel_from_name(const std::string& name) {
  if (name == "parzen") return KernelKind::parzen;
  if (name == "qs" || name == "quadratic_spectral") return KernelKind::quadratic_spectral;
  if (name == "bartlett") return KernelKind::bartlett;
  throw ConfigError("unknown kernel '" + name + "' (expected parzen, qs, or bartlett)");
}

std::string kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::parzen:
      return "parzen";
    case KernelKind::quadratic_spectral:
      return "quadratic_spectral";
    case KernelKind::bartlett:
      return "bartlett";
  }
  return "unknown";
}

double default_bandwidth(Eigen::Index T) {
  return std::ceil(1.3 * std::cbrt(static_cast<double>(T)));
}

double kernel_value(const KernelSpec& spec, double x) {
  const double a = std::abs(x);
  switch (spec.kind) {
    case KernelKind::parzen: {
      if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
      if (a <= 1.0) {
        const double b = 1.0 - a;
        return 2.0 * b * b * b;
      }
      return 0.0;
    }
    case KernelKind::bartlett:
      return a < 1.0 ? 1.0 - a : 0.0;
    case KernelKind::quadratic_spectral: {
      const double z = 1.2 * M_PI * a;  // 6 pi x / 5
      if (a < 1e-2) {
        // Series around the removable singularity; the direct form loses
        // ~1e-9 to cancellation below this threshold.
        const double z2 = z * z;
        return 1.0 - z2 / 10.0 + z2 * z2 / 280.0 - z2 * z2 * z2 / 15120.0;
      }
      return (25.0 / (12.0 * M_PI * M_PI * x * x)) * (std::sin(z) / z - std::cos(z));
    }
  }
  return 0.0;
}

Eigen::MatrixXd score_series(const Eigen::VectorXd& residuals, const TimeSeriesDataset& data,
                             const PrecisionEstimate& prec) {
  if (residuals.size() != data.T()) {
    throw DimensionError("residual length does not match the dataset");
  }
  if (prec.rows().cols() != data.p()) {
    throw DimensionError("precision rows do not match the dataset width");
  }
  Eigen::MatrixXd scores = data.X * prec.rows().transpose();
  scores.array().colwise() *= residuals.array();
  return scores;
}

LongRunVariance hac_estimate(const Eigen::MatrixXd& scores, const KernelSpec& kernel,
                             std::vector<int> group) {
  const Eigen::Index T = scores.rows();
  const Eigen::Index q = scores.cols();
  if (T < 2) throw DimensionError("HAC estimation needs T >= 2 observations");
  if (!(kernel.bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!scores.allFinite()) throw NumericError("scores contain a non-finite value");

  const double Td = static_cast<double>(T);
  const bool compact_support =
      kernel.kind == KernelKind::parzen || kernel.kind == KernelKind::bartlett;

  Eigen::MatrixXd xi = scores.transpose() * scores / Td;  // Gamma_0
  Eigen::MatrixXd gamma_k(q, q);
  for (Eigen::Index k = 1; k < T; ++k) {
    const double x = static_cast<double>(k) / kernel.bandwidth;
    if (compact_support && x >= 1.0) break;
    const double w = kernel_value(kernel, x);
    if (w == 0.0) continue;
    gamma_k.noalias() =
        scores.topRows(T - k).transpose() * scores.bottomRows(T - k) / Td;
    xi.noalias() += w * gamma_k;
    xi.noalias() += w * gamma_k.transpose();
  }
  xi = 0.5 * (xi + xi.transpose()).eval();

  LongRunVariance lrv;
  lrv.xi = std::move(xi);
  lrv.kernel = kernel;
  lrv.group = std::move(group);
  return lrv;
}

}  // namespace hdgc
