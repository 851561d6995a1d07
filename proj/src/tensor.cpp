#include "tnkit/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace tnkit {

Index product(std::span<const Index> dims) {
  Index p = 1;
  for (Index d : dims) p *= d;
  return p;
}

DenseTensor::DenseTensor(std::vector<Index> dims)
    : dims_(std::move(dims)), data_(product(dims_), Scalar(0)) {}

DenseTensor::DenseTensor(std::vector<Index> dims, std::vector<Scalar> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (data_.size() != product(dims_)) {
    throw std::invalid_argument("DenseTensor: data length " + std::to_string(data_.size()) +
                                " does not match extents product " +
                                std::to_string(product(dims_)));
  }
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
  return from_matrix(m, {static_cast<Index>(m.rows()), static_cast<Index>(m.cols())});
}

DenseTensor DenseTensor::from_matrix(const Matrix& m, std::vector<Index> dims) {
  std::vector<Scalar> data(m.data(), m.data() + m.size());
  return DenseTensor(std::move(dims), std::move(data));
}

Index DenseTensor::dim(Index axis) const {
  if (axis >= dims_.size()) throw std::out_of_range("DenseTensor::dim: axis out of range");
  return dims_[axis];
}

DenseTensor& DenseTensor::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != dims_.size()) {
    throw std::invalid_argument("DenseTensor: label count must equal rank");
  }
  labels_ = std::move(labels);
  return *this;
}

Index DenseTensor::offset(std::span<const Index> idx) const {
  if (idx.size() != dims_.size()) throw std::invalid_argument("DenseTensor: index rank mismatch");
  Index off = 0;
  Index stride = 1;
  for (Index k = 0; k < idx.size(); ++k) {
    if (idx[k] >= dims_[k]) throw std::out_of_range("DenseTensor: index out of range");
    off += idx[k] * stride;
    stride *= dims_[k];
  }
  return off;
}

MatrixMap DenseTensor::matrix(Index n_row_axes) {
  if (n_row_axes > dims_.size()) throw std::invalid_argument("DenseTensor::matrix: too many row axes");
  Index rows = product(std::span<const Index>(dims_).first(n_row_axes));
  Index cols = product(std::span<const Index>(dims_).subspan(n_row_axes));
  return MatrixMap(data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

ConstMatrixMap DenseTensor::matrix(Index n_row_axes) const {
  if (n_row_axes > dims_.size()) throw std::invalid_argument("DenseTensor::matrix: too many row axes");
  Index rows = product(std::span<const Index>(dims_).first(n_row_axes));
  Index cols = product(std::span<const Index>(dims_).subspan(n_row_axes));
  return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

DenseTensor DenseTensor::reshaped(std::vector<Index> dims) const {
  if (product(dims) != data_.size()) throw std::invalid_argument("DenseTensor::reshaped: size mismatch");
  return DenseTensor(std::move(dims), data_);
}

double DenseTensor::norm() const {
  double s = 0.0;
  for (const Scalar& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

DenseTensor DenseTensor::conj() const {
  DenseTensor out = *this;
  for (Scalar& v : out.data_) v = std::conj(v);
  return out;
}

DenseTensor& DenseTensor::scale(Scalar s) {
  for (Scalar& v : data_) v *= s;
  return *this;
}

DenseTensor permute(const DenseTensor& t, std::span<const Index> perm) {
  const Index r = t.rank();
  if (perm.size() != r) throw std::invalid_argument("permute: permutation length must equal rank");
  std::vector<bool> seen(r, false);
  for (Index p : perm) {
    if (p >= r || seen[p]) throw std::invalid_argument("permute: not a permutation");
    seen[p] = true;
  }
  bool identity = true;
  for (Index k = 0; k < r; ++k) identity = identity && perm[k] == k;
  if (identity) return t;

  std::vector<Index> in_stride(r);
  Index s = 1;
  for (Index k = 0; k < r; ++k) {
    in_stride[k] = s;
    s *= t.dims()[k];
  }
  std::vector<Index> out_dims(r), stride(r);
  for (Index k = 0; k < r; ++k) {
    out_dims[k] = t.dims()[perm[k]];
    stride[k] = in_stride[perm[k]];
  }
  DenseTensor out(out_dims);
  const Index n = t.size();
  if (n == 0) return out;
  const Scalar* src = t.ptr();
  Scalar* dst = out.ptr();
  std::vector<Index> counter(r, 0);
  const Index inner = out_dims[0];
  const Index inner_stride = stride[0];
  Index src_off = 0;
  for (Index o = 0; o < n; o += inner) {
    for (Index i = 0; i < inner; ++i) dst[o + i] = src[src_off + i * inner_stride];
    for (Index k = 1; k < r; ++k) {
      ++counter[k];
      src_off += stride[k];
      if (counter[k] < out_dims[k]) break;
      src_off -= stride[k] * out_dims[k];
      counter[k] = 0;
    }
  }
  return out;
}

DenseTensor permute(const DenseTensor& t, std::initializer_list<Index> perm) {
  return permute(t, std::span<const Index>(perm.begin(), perm.size()));
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const std::pair<Index, Index>> pairs) {
  std::vector<bool> a_paired(a.rank(), false), b_paired(b.rank(), false);
  for (auto [ia, ib] : pairs) {
    if (ia >= a.rank() || ib >= b.rank()) throw std::invalid_argument("contract: axis out of range");
    if (a_paired[ia] || b_paired[ib]) throw std::invalid_argument("contract: axis paired twice");
    if (a.dims()[ia] != b.dims()[ib]) {
      throw std::invalid_argument("contract: paired extents differ (" + std::to_string(a.dims()[ia]) +
                                  " vs " + std::to_string(b.dims()[ib]) + ")");
    }
    a_paired[ia] = b_paired[ib] = true;
  }
  std::vector<Index> perm_a, perm_b, out_dims;
  for (Index k = 0; k < a.rank(); ++k) {
    if (!a_paired[k]) {
      perm_a.push_back(k);
      out_dims.push_back(a.dims()[k]);
    }
  }
  const Index n_free_a = perm_a.size();
  for (auto [ia, ib] : pairs) {
    perm_a.push_back(ia);
    perm_b.push_back(ib);
  }
  for (Index k = 0; k < b.rank(); ++k) {
    if (!b_paired[k]) {
      perm_b.push_back(k);
      out_dims.push_back(b.dims()[k]);
    }
  }
  DenseTensor ap = permute(a, perm_a);
  DenseTensor bp = permute(b, perm_b);
  auto am = ap.matrix(n_free_a);
  auto bm = bp.matrix(pairs.size());
  Matrix prod = am * bm;
  return DenseTensor(out_dims, std::vector<Scalar>(prod.data(), prod.data() + prod.size()));
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<std::pair<Index, Index>> pairs) {
  return contract(a, b, std::span<const std::pair<Index, Index>>(pairs.begin(), pairs.size()));
}

DenseTensor fuse(const DenseTensor& t, Index first, Index count) {
  if (count == 0 || first + count > t.rank()) throw std::invalid_argument("fuse: axis range out of bounds");
  std::vector<Index> dims(t.dims().begin(), t.dims().begin() + first);
  dims.push_back(product(std::span<const Index>(t.dims()).subspan(first, count)));
  dims.insert(dims.end(), t.dims().begin() + first + count, t.dims().end());
  return t.reshaped(std::move(dims));
}

DenseTensor split(const DenseTensor& t, Index axis, std::span<const Index> extents) {
  if (axis >= t.rank()) throw std::invalid_argument("split: axis out of range");
  if (product(extents) != t.dims()[axis]) throw std::invalid_argument("split: extents do not multiply to axis extent");
  std::vector<Index> dims(t.dims().begin(), t.dims().begin() + axis);
  dims.insert(dims.end(), extents.begin(), extents.end());
  dims.insert(dims.end(), t.dims().begin() + axis + 1, t.dims().end());
  return t.reshaped(std::move(dims));
}

}  // namespace tnkit
