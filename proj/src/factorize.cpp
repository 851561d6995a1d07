#include "tnkit/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnkit {

namespace {

void check_finite(const Matrix& a, const char* where) {
  if (!a.allFinite()) throw std::runtime_error(std::string(where) + ": input contains NaN or Inf");
}

std::vector<Index> head_dims(const DenseTensor& t, Index n) {
  return {t.dims().begin(), t.dims().begin() + n};
}

std::vector<Index> tail_dims(const DenseTensor& t, Index n) {
  return {t.dims().begin() + n, t.dims().end()};
}

void check_split(const DenseTensor& t, Index n_left, const char* where) {
  if (n_left == 0 || n_left >= t.rank()) {
    throw std::invalid_argument(std::string(where) + ": need at least one axis on each side");
  }
}

DenseTensor with_trailing(const Matrix& m, std::vector<Index> dims, Index k) {
  dims.push_back(k);
  return DenseTensor::from_matrix(m, std::move(dims));
}

DenseTensor with_leading(const Matrix& m, const std::vector<Index>& rest, Index k) {
  std::vector<Index> dims{k};
  dims.insert(dims.end(), rest.begin(), rest.end());
  return DenseTensor::from_matrix(m, std::move(dims));
}

}  // namespace

Index truncation_rank(const std::vector<double>& s, const TruncationSpec& spec, Index min_rank) {
  const Index n = s.size();
  if (n == 0) return 0;
  double total = 0.0;
  for (double v : s) total += v * v;
  Index nonzero = 0;
  const double cutoff = kZeroSingularValue * s.front();
  while (nonzero < n && s[nonzero] > cutoff) ++nonzero;
  Index keep = nonzero;
  if (spec.tol > 0.0 && total > 0.0) {
    // tail[k] = weight discarded when keeping k values
    double tail = 0.0;
    for (Index k = n; k > 0; --k) {
      double next = tail + s[k - 1] * s[k - 1];
      if (next / total > spec.tol) {
        keep = std::min(keep, k);
        break;
      }
      tail = next;
      if (k == 1) keep = 0;
    }
  }
  keep = std::min(keep, spec.cap());
  keep = std::max(keep, std::min(min_rank, n));
  return keep;
}

MatrixSvd svd_matrix(const Matrix& a, const TruncationSpec& spec, Index min_rank) {
  check_finite(a, "svd_truncate");
  MatrixSvd out;
  if (a.size() == 0) {
    out.u = Matrix(a.rows(), 0);
    out.vh = Matrix(0, a.cols());
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  std::vector<double> s(sv.data(), sv.data() + sv.size());
  for (double v : s) out.total_weight += v * v;
  const Index k = truncation_rank(s, spec, min_rank);
  double kept = 0.0;
  for (Index i = 0; i < k; ++i) kept += s[i] * s[i];
  double tail = 0.0;
  for (Index i = k; i < s.size(); ++i) tail += s[i] * s[i];
  out.discarded_weight = out.total_weight > 0.0 ? tail / out.total_weight : 0.0;
  out.u = svd.matrixU().leftCols(static_cast<Eigen::Index>(k));
  out.vh = svd.matrixV().leftCols(static_cast<Eigen::Index>(k)).adjoint();
  out.s.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

void qr_matrix(const Matrix& a, Matrix& q, Matrix& r) {
  check_finite(a, "qr_factor");
  const Eigen::Index m = a.rows(), n = a.cols(), k = std::min(m, n);
  Eigen::HouseholderQR<Matrix> qr(a);
  q = qr.householderQ() * Matrix::Identity(m, k);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

void qr_matrix_enriched(const Matrix& a, Index cols, Matrix& q, Matrix& r) {
  check_finite(a, "qr_factor_enriched");
  const Eigen::Index m = a.rows(), n = a.cols();
  const Eigen::Index k = std::min(m, n);
  const Eigen::Index target = std::max<Eigen::Index>(k, std::min<Eigen::Index>(static_cast<Eigen::Index>(cols), m));
  Eigen::HouseholderQR<Matrix> qr(a);
  q = qr.householderQ() * Matrix::Identity(m, target);
  r = Matrix::Zero(target, n);
  r.topRows(k) = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

Factorization qr_factor(const DenseTensor& t, Index n_left_axes) {
  check_split(t, n_left_axes, "qr_factor");
  Matrix q, r;
  qr_matrix(t.matrix(n_left_axes), q, r);
  const Index k = static_cast<Index>(q.cols());
  Factorization f;
  f.left = with_trailing(q, head_dims(t, n_left_axes), k);
  f.right = with_leading(r, tail_dims(t, n_left_axes), k);
  return f;
}

Factorization qr_factor_enriched(const DenseTensor& t, Index n_left_axes, Index target_rank) {
  check_split(t, n_left_axes, "qr_factor_enriched");
  Matrix q, r;
  qr_matrix_enriched(t.matrix(n_left_axes), target_rank, q, r);
  const Index k = static_cast<Index>(q.cols());
  Factorization f;
  f.left = with_trailing(q, head_dims(t, n_left_axes), k);
  f.right = with_leading(r, tail_dims(t, n_left_axes), k);
  return f;
}

Factorization svd_truncate(const DenseTensor& t, Index n_left_axes, const TruncationSpec& spec,
                           Absorb absorb, Index min_rank) {
  check_split(t, n_left_axes, "svd_truncate");
  MatrixSvd svd = svd_matrix(t.matrix(n_left_axes), spec, min_rank);
  const Index k = svd.s.size();
  Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(svd.s.data(), static_cast<Eigen::Index>(k));
  Matrix left = svd.u, right = svd.vh;
  if (absorb == Absorb::Right) {
    right = s.cast<Scalar>().asDiagonal() * right;
  } else {
    left = left * s.cast<Scalar>().asDiagonal();
  }
  Factorization f;
  f.left = with_trailing(left, head_dims(t, n_left_axes), k);
  f.right = with_leading(right, tail_dims(t, n_left_axes), k);
  f.singular_values = std::move(svd.s);
  f.discarded_weight = svd.discarded_weight;
  f.total_weight = svd.total_weight;
  return f;
}

}  // namespace tnkit
