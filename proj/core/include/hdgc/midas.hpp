#pragma once

#include <Eigen/Dense>

namespace hdgc {

/// Weight dictionary for aggregating a block of high-frequency lags into a
/// small number of polynomial coordinates. Column k is the degree-k shifted
/// Legendre polynomial sampled on the lag grid u_l = l/(L-1), discretely
/// re-orthogonalized so the columns are exactly orthogonal under the grid
/// inner product, and scaled to unit empirical norm |w|_2^2 / L = 1 (hence
/// column 0 is all ones).
struct MidasDictionary {
  Eigen::MatrixXd weights;  // L x (degree + 1)
  int degree = 0;
  int lag_count = 0;
};

MidasDictionary legendre_dictionary(int degree, int lag_count);

/// Applies the dictionary to a T x L block of high-frequency lags:
/// output = lag_block * weights / L, the 1/m averaging of the MIDAS lag
/// polynomial folded into the product. A degree-0 dictionary therefore
/// yields the row means of the block.
Eigen::MatrixXd aggregate_midas(const Eigen::MatrixXd& lag_block, const MidasDictionary& dict);

}  // namespace hdgc
