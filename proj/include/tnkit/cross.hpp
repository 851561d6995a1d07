#pragma once

#include "tnkit/factorize.hpp"
#include "tnkit/tensor.hpp"

#include <functional>
#include <vector>

namespace tnkit {

// P = L * diag(d) * U with unit-triangular L and U, obtained by Gaussian
// elimination in the order the pivots were accepted (no further row swaps).
struct PivotLu {
  Matrix lower;
  Vector diag;
  Matrix upper;
  Index size() const { return static_cast<Index>(diag.size()); }
};

// Throws if a leading minor is singular in the given order.
PivotLu factor_in_pivot_order(const Matrix& pivot_matrix);

enum class Side { Left, Right };

// Side::Right returns block * P^-1, Side::Left returns P^-1 * block, using
// only triangular solves on the stored factors.
Matrix apply_pivot_inverse(const PivotLu& lu, const Matrix& block, Side side);

struct PivotMatrixState {
  std::vector<Index> rows;  // pivot rows in acceptance order
  std::vector<Index> cols;
  PivotLu lu;
  std::vector<double> pivot_errors;  // |residual| at each accepted pivot
  double final_error = 0.0;          // max |residual| after the last pivot
  Matrix col_block;                  // A(:, cols)
  Matrix row_block;                  // A(rows, :)
  Index rank() const { return rows.size(); }
};

using MatrixOracle = std::function<Scalar(Index, Index)>;

// Cross interpolation by full-search partial-rank-revealing LU: each step
// takes the largest residual entry (ties broken by lowest row, then column),
// until the largest residual is at most spec.tol * max|A| or the rank cap is
// reached.
PivotMatrixState matrix_ci(const MatrixOracle& oracle, Index n_rows, Index n_cols,
                           const TruncationSpec& spec);
PivotMatrixState matrix_ci(const Matrix& a, const TruncationSpec& spec);

Matrix prrlu_apply_inverse(const PivotMatrixState& state, const Matrix& block, Side side);

// A(:, J) P^-1 A(I, :)
Matrix ci_reconstruct(const PivotMatrixState& state);

}  // namespace tnkit
