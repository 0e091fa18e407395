#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hdgc/dataset.hpp"
#include "hdgc/nodewise.hpp"

namespace hdgc {

enum class KernelKind { parzen, quadratic_spectral, bartlett };

KernelKind kernel_from_name(const std::string& name);  // parzen | qs | bartlett
std::string kernel_name(KernelKind kind);

/// Kernel shape plus the lag-truncation bandwidth M_T used to rescale lags.
struct KernelSpec {
  KernelKind kind = KernelKind::parzen;
  double bandwidth = 0.0;
};

/// Rule-of-thumb default bandwidth ceil(1.3 * T^(1/3)). Every report echoes
/// the bandwidth actually used; no data-driven selection is attempted.
double default_bandwidth(Eigen::Index T);

/// Base kernel K(x): K(0) = 1, even, |K| <= 1. The bandwidth in `spec` is
/// not applied here; hac_estimate evaluates K(k / M_T).
double kernel_value(const KernelSpec& spec, double x);

/// Long-run variance estimate for a group of coordinates.
struct LongRunVariance {
  Eigen::MatrixXd xi;  // |G| x |G|, symmetric
  KernelSpec kernel;
  std::vector<int> group;
};

/// Score series V_t = u_t * (Theta_G x_t), one row per observation and one
/// column per requested precision row.
Eigen::MatrixXd score_series(const Eigen::VectorXd& residuals, const TimeSeriesDataset& data,
                             const PrecisionEstimate& prec);

/// Kernel-weighted sum of sample autocovariances
///   Xi = sum_{|k|<T} K(k/M_T) Gamma_k,
/// Gamma_k = (1/T) sum_{t=1}^{T-k} V_t V_{t+k}' for k >= 0 and
/// Gamma_{-k} = Gamma_k'. The denominator is T for every lag. The sum is
/// symmetrized as (A + A')/2 to remove floating-point drift.
LongRunVariance hac_estimate(const Eigen::MatrixXd& scores, const KernelSpec& kernel,
                             std::vector<int> group = {});

}  // namespace hdgc
