#pragma once

#include <cstddef>
#include <vector>

#include "covspec/matrix.hpp"

namespace covspec {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Stops when the
/// off-diagonal Frobenius norm falls below `tolerance` times the matrix
/// Frobenius norm, or after `max_sweeps` sweeps.
SymmetricEigen jacobi_eigen(Matrix a, double tolerance = 1e-12, int max_sweeps = 100);

/// Rank-r truncated SVD of a matrix whose rows are the column vectors z_i of
/// Z (so `rows` is Z transposed, M x d). Computed through the smaller Gram
/// matrix. Singular values below 1e-10 * sigma_max count as zero.
struct TruncatedSvd {
  std::vector<double> singular_values;  // all min(M, d) values, descending
  Matrix left;                          // d x r, columns u_j
  Matrix right;                         // M x r, columns v_j
  std::size_t rank = 0;
};

TruncatedSvd truncated_svd(const Matrix& rows, std::size_t rank);

}  // namespace covspec
