#pragma once

#include "tnkit/tensor.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace tnkit {

// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kZeroSingularValue = 1e-14;

// Rank cap plus a tolerance on the relative discarded weight
// sum_{i>=k} s_i^2 / sum_i s_i^2. The kept rank is the smallest one meeting
// the tolerance, clipped to max_rank.
struct TruncationSpec {
  std::optional<Index> max_rank;
  double tol = 0.0;

  static TruncationSpec exact() { return {}; }
  static TruncationSpec rank(Index chi) { return {chi, 0.0}; }
  static TruncationSpec tolerance(double t) { return {std::nullopt, t}; }
  static TruncationSpec both(Index chi, double t) { return {chi, t}; }
  Index cap() const { return max_rank.value_or(std::numeric_limits<Index>::max()); }
};

enum class Absorb { Left, Right };

struct Factorization {
  DenseTensor left;   // (left axes..., k)
  DenseTensor right;  // (k, right axes...)
  std::vector<double> singular_values;  // kept values, SVD only
  double discarded_weight = 0.0;        // relative to total_weight
  double total_weight = 0.0;            // sum of all squared singular values
  Index rank() const { return left.dims().back(); }
  double discarded_absolute() const { return discarded_weight * total_weight; }
};

struct MatrixSvd {
  Matrix u;                // m x k
  std::vector<double> s;   // k
  Matrix vh;               // k x n
  double discarded_weight = 0.0;
  double total_weight = 0.0;
};

// Kept rank for a descending spectrum under spec; never below min_rank
// unless the spectrum is shorter.
Index truncation_rank(const std::vector<double>& s, const TruncationSpec& spec, Index min_rank = 0);

MatrixSvd svd_matrix(const Matrix& a, const TruncationSpec& spec, Index min_rank = 0);

// Thin QR: q is m x min(m,n) with orthonormal columns, r is min(m,n) x n.
void qr_matrix(const Matrix& a, Matrix& q, Matrix& r);
// Thin QR with q padded by orthonormal complement columns up to `cols`
// (capped at m); the matching rows of r are zero.
void qr_matrix_enriched(const Matrix& a, Index cols, Matrix& q, Matrix& r);

Factorization qr_factor(const DenseTensor& t, Index n_left_axes);
Factorization qr_factor_enriched(const DenseTensor& t, Index n_left_axes, Index target_rank);
Factorization svd_truncate(const DenseTensor& t, Index n_left_axes, const TruncationSpec& spec,
                           Absorb absorb = Absorb::Right, Index min_rank = 0);

}  // namespace tnkit
