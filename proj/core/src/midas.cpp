#include "hdgc/midas.hpp"

#include <cmath>
#include <string>

#include "hdgc/errors.hpp"

namespace hdgc {

MidasDictionary legendre_dictionary(int degree, int lag_count) {
  if (degree < 0) {
    throw ConfigError("polynomial degree must be >= 0, got " + std::to_string(degree));
  }
  if (lag_count < degree + 1) {
    throw ConfigError("dictionary is rank deficient: " + std::to_string(lag_count) +
                      " lags cannot support degree " + std::to_string(degree) +
                      " (need at least " + std::to_string(degree + 1) + ")");
  }

  const int L = lag_count;
  const int cols = degree + 1;
  Eigen::MatrixXd W(L, cols);

  // Shifted Legendre P_k(2u - 1) on the uniform grid via the three-term
  // recurrence. L == 1 only admits degree 0.
  for (int l = 0; l < L; ++l) {
    const double u = (L == 1) ? 0.0 : static_cast<double>(l) / static_cast<double>(L - 1);
    const double t = 2.0 * u - 1.0;
    double pkm1 = 1.0;
    double pk = t;
    W(l, 0) = 1.0;
    if (cols > 1) W(l, 1) = t;
    for (int k = 2; k < cols; ++k) {
      const double pkp1 = ((2.0 * k - 1.0) * t * pk - (k - 1.0) * pkm1) / static_cast<double>(k);
      W(l, k) = pkp1;
      pkm1 = pk;
      pk = pkp1;
    }
  }

  // Equally spaced samples of continuum-orthogonal polynomials are not
  // orthogonal under the grid inner product; re-orthogonalize so the penalty
  // sees uncorrelated dictionary coordinates. Two modified Gram-Schmidt
  // passes keep the cross terms at rounding level.
  const double unit = std::sqrt(static_cast<double>(L));
  for (int k = 0; k < cols; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int m = 0; m < k; ++m) {
        const double proj = W.col(k).dot(W.col(m)) / W.col(m).squaredNorm();
        W.col(k) -= proj * W.col(m);
      }
    }
    const double norm = W.col(k).norm();
    if (!(norm > 1e-12 * unit)) {
      throw ConfigError("dictionary is rank deficient at degree " + std::to_string(k));
    }
    // Unit empirical norm; keeps column 0 at all ones and makes the penalty
    // scale comparable across dictionary coordinates.
    W.col(k) *= unit / norm;
    if (W(L - 1, k) < 0.0) W.col(k) = -W.col(k);
  }

  return MidasDictionary{std::move(W), degree, lag_count};
}

Eigen::MatrixXd aggregate_midas(const Eigen::MatrixXd& lag_block, const MidasDictionary& dict) {
  if (lag_block.cols() != dict.lag_count) {
    throw DimensionError("lag block has " + std::to_string(lag_block.cols()) +
                         " columns but the dictionary expects " + std::to_string(dict.lag_count));
  }
  return lag_block * dict.weights / static_cast<double>(dict.lag_count);
}

}  // namespace hdgc
