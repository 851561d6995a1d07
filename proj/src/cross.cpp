#include "tnkit/cross.hpp"

#include <cmath>
#include <stdexcept>

namespace tnkit {

PivotLu factor_in_pivot_order(const Matrix& pivot_matrix) {
  const Eigen::Index n = pivot_matrix.rows();
  if (pivot_matrix.cols() != n) throw std::invalid_argument("factor_in_pivot_order: pivot matrix must be square");
  Matrix work = pivot_matrix;
  PivotLu lu;
  lu.lower = Matrix::Identity(n, n);
  lu.upper = Matrix::Identity(n, n);
  lu.diag = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar p = work(k, k);
    if (p == Scalar(0) || !std::isfinite(std::abs(p))) {
      throw std::runtime_error("factor_in_pivot_order: singular leading minor at step " + std::to_string(k));
    }
    lu.diag(k) = p;
    const Eigen::Index rest = n - k - 1;
    if (rest == 0) break;
    lu.lower.col(k).tail(rest) = work.col(k).tail(rest) / p;
    lu.upper.row(k).tail(rest) = work.row(k).tail(rest) / p;
    work.bottomRightCorner(rest, rest).noalias() -= work.col(k).tail(rest) * lu.upper.row(k).tail(rest);
  }
  return lu;
}

Matrix apply_pivot_inverse(const PivotLu& lu, const Matrix& block, Side side) {
  const Eigen::Index n = static_cast<Eigen::Index>(lu.size());
  Matrix x = block;
  if (side == Side::Right) {
    if (block.cols() != n) throw std::invalid_argument("apply_pivot_inverse: column count must match pivot count");
    // x L D U = block
    lu.upper.triangularView<Eigen::UnitUpper>().solveInPlace<Eigen::OnTheRight>(x);
    for (Eigen::Index k = 0; k < n; ++k) x.col(k) /= lu.diag(k);
    lu.lower.triangularView<Eigen::UnitLower>().solveInPlace<Eigen::OnTheRight>(x);
  } else {
    if (block.rows() != n) throw std::invalid_argument("apply_pivot_inverse: row count must match pivot count");
    lu.lower.triangularView<Eigen::UnitLower>().solveInPlace(x);
    for (Eigen::Index k = 0; k < n; ++k) x.row(k) /= lu.diag(k);
    lu.upper.triangularView<Eigen::UnitUpper>().solveInPlace(x);
  }
  return x;
}

PivotMatrixState matrix_ci(const Matrix& a, const TruncationSpec& spec) {
  if (!a.allFinite()) throw std::runtime_error("matrix_ci: matrix contains NaN or Inf");
  PivotMatrixState st;
  const Eigen::Index m = a.rows(), n = a.cols();
  Matrix residual = a;
  const double scale = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  const Index cap = std::min<Index>(spec.cap(), static_cast<Index>(std::min(m, n)));
  while (st.rank() < cap) {
    Eigen::Index bi = 0, bj = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = std::abs(residual(i, j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (best <= spec.tol * scale || best == 0.0) break;
    st.rows.push_back(static_cast<Index>(bi));
    st.cols.push_back(static_cast<Index>(bj));
    st.pivot_errors.push_back(best);
    const Scalar p = residual(bi, bj);
    Vector c = residual.col(bj);
    Eigen::RowVectorX<Scalar> r = residual.row(bi) / p;
    residual.noalias() -= c * r;
  }
  st.final_error = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;
  const Index k = st.rank();
  st.col_block = Matrix(m, static_cast<Eigen::Index>(k));
  st.row_block = Matrix(static_cast<Eigen::Index>(k), n);
  Matrix pivots(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (Index q = 0; q < k; ++q) {
    st.col_block.col(static_cast<Eigen::Index>(q)) = a.col(static_cast<Eigen::Index>(st.cols[q]));
    st.row_block.row(static_cast<Eigen::Index>(q)) = a.row(static_cast<Eigen::Index>(st.rows[q]));
  }
  for (Index p = 0; p < k; ++p)
    for (Index q = 0; q < k; ++q) pivots(p, q) = a(st.rows[p], st.cols[q]);
  st.lu = factor_in_pivot_order(pivots);
  return st;
}

PivotMatrixState matrix_ci(const MatrixOracle& oracle, Index n_rows, Index n_cols, const TruncationSpec& spec) {
  Matrix a(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (Index j = 0; j < n_cols; ++j)
    for (Index i = 0; i < n_rows; ++i) a(i, j) = oracle(i, j);
  return matrix_ci(a, spec);
}

Matrix prrlu_apply_inverse(const PivotMatrixState& state, const Matrix& block, Side side) {
  return apply_pivot_inverse(state.lu, block, side);
}

Matrix ci_reconstruct(const PivotMatrixState& state) {
  if (state.rank() == 0) return Matrix::Zero(state.col_block.rows(), state.row_block.cols());
  return apply_pivot_inverse(state.lu, state.col_block, Side::Right) * state.row_block;
}

}  // namespace tnkit
