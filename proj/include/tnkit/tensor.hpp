#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tnkit {

using Scalar = std::complex<double>;
using Index = std::size_t;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

// Dense complex tensor stored column-major: the first index varies fastest,
// so fusing axes i and j gives the combined index i + j * dim(i).
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<Index> dims);
  DenseTensor(std::vector<Index> dims, std::vector<Scalar> data);

  static DenseTensor from_matrix(const Matrix& m);
  // Reinterprets the column-major storage of m with the given extents.
  static DenseTensor from_matrix(const Matrix& m, std::vector<Index> dims);

  const std::vector<Index>& dims() const { return dims_; }
  Index dim(Index axis) const;
  Index rank() const { return dims_.size(); }
  Index size() const { return data_.size(); }

  std::span<const Scalar> data() const { return data_; }
  std::span<Scalar> data() { return data_; }
  const Scalar* ptr() const { return data_.data(); }
  Scalar* ptr() { return data_.data(); }

  const std::vector<std::string>& labels() const { return labels_; }
  DenseTensor& set_labels(std::vector<std::string> labels);

  Index offset(std::span<const Index> idx) const;
  Scalar& at(std::span<const Index> idx) { return data_[offset(idx)]; }
  Scalar at(std::span<const Index> idx) const { return data_[offset(idx)]; }
  Scalar& operator()(std::initializer_list<Index> idx) {
    return at(std::span<const Index>(idx.begin(), idx.size()));
  }
  Scalar operator()(std::initializer_list<Index> idx) const {
    return at(std::span<const Index>(idx.begin(), idx.size()));
  }

  // Matrix view with the first n_row_axes axes fused into rows.
  MatrixMap matrix(Index n_row_axes);
  ConstMatrixMap matrix(Index n_row_axes) const;
  Matrix to_matrix(Index n_row_axes) const { return matrix(n_row_axes); }

  DenseTensor reshaped(std::vector<Index> dims) const;
  double norm() const;
  DenseTensor conj() const;
  DenseTensor& scale(Scalar s);

 private:
  std::vector<Index> dims_;
  std::vector<Scalar> data_;
  std::vector<std::string> labels_;
};

Index product(std::span<const Index> dims);

DenseTensor permute(const DenseTensor& t, std::span<const Index> perm);
DenseTensor permute(const DenseTensor& t, std::initializer_list<Index> perm);

// Sums over the paired axes (axis of a, axis of b). Result axes are the free
// axes of a in order, followed by the free axes of b in order.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const std::pair<Index, Index>> pairs);
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<std::pair<Index, Index>> pairs);

// Merges the `count` consecutive axes starting at `first` into one axis.
DenseTensor fuse(const DenseTensor& t, Index first, Index count);
// Splits `axis` into the given extents (inverse of fuse).
DenseTensor split(const DenseTensor& t, Index axis, std::span<const Index> extents);

}  // namespace tnkit
