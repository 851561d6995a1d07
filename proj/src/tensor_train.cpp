#include "tnkit/tensor_train.hpp"

#include "environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnkit {

namespace {

using Slice = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;

// Physical slice s of a (l, d, r) core as an l x r matrix.
Slice slice(const DenseTensor& core, Index s) {
  const Index l = core.dim(0), d = core.dim(1), r = core.dim(2);
  return Slice(core.ptr() + l * s, static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r),
               Eigen::OuterStride<>(static_cast<Eigen::Index>(l * d)));
}

DenseTensor core_from(const Matrix& m, Index l, Index d, Index r) {
  return DenseTensor::from_matrix(m, {l, d, r});
}

void require_same_shape(const TensorTrain& a, const TensorTrain& b, const char* where) {
  if (a.size() != b.size() || a.physical_dims() != b.physical_dims()) {
    throw std::invalid_argument(std::string(where) + ": trains have different physical extents");
  }
}

// QR on core k, pushing R into core k+1.
void left_orthogonalize(std::vector<DenseTensor>& cores, Index k) {
  DenseTensor& c = cores[k];
  const Index l = c.dim(0), d = c.dim(1);
  Matrix q, r;
  qr_matrix(c.matrix(2), q, r);
  const Index m = static_cast<Index>(q.cols());
  c = core_from(q, l, d, m);
  DenseTensor& next = cores[k + 1];
  Matrix merged = r * next.matrix(1);
  next = core_from(merged, m, next.dim(1), next.dim(2));
}

// LQ on core k, pushing L into core k-1.
void right_orthogonalize(std::vector<DenseTensor>& cores, Index k) {
  DenseTensor& c = cores[k];
  const Index d = c.dim(1), r = c.dim(2);
  Matrix q, rr;
  qr_matrix(c.matrix(1).adjoint(), q, rr);
  const Index m = static_cast<Index>(q.cols());
  Matrix qh = q.adjoint();
  c = core_from(qh, m, d, r);
  DenseTensor& prev = cores[k - 1];
  Matrix merged = prev.matrix(2) * rr.adjoint();
  prev = core_from(merged, prev.dim(0), prev.dim(1), m);
}

// Operator cores viewed as train cores with fused (out, in) physical index.
TensorTrain as_train(const TensorTrainOperator& op) {
  std::vector<DenseTensor> cores;
  for (const auto& c : op.cores()) cores.push_back(c.reshaped({c.dim(0), c.dim(1) * c.dim(2), c.dim(3)}));
  return TensorTrain(std::move(cores));
}

TensorTrainOperator as_operator(const TensorTrain& tt, const TensorTrainOperator& shape) {
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < tt.size(); ++k) {
    const DenseTensor& c = tt.core(k);
    cores.push_back(c.reshaped({c.dim(0), shape.out_dim(k), shape.in_dim(k), c.dim(2)}));
  }
  return TensorTrainOperator(std::move(cores));
}

}  // namespace

// ---------------------------------------------------------------- TensorTrain

TensorTrain::TensorTrain(std::vector<DenseTensor> cores, std::optional<Index> center)
    : cores_(std::move(cores)), center_(center) {
  validate();
}

std::vector<Index> TensorTrain::physical_dims() const {
  std::vector<Index> d;
  for (const auto& c : cores_) d.push_back(c.dim(1));
  return d;
}

std::vector<Index> TensorTrain::bond_dims() const {
  std::vector<Index> b;
  for (Index k = 0; k + 1 < cores_.size(); ++k) b.push_back(cores_[k].dim(2));
  return b;
}

Index TensorTrain::max_bond() const {
  Index m = 1;
  for (Index b : bond_dims()) m = std::max(m, b);
  return m;
}

void TensorTrain::validate() const {
  if (cores_.empty()) throw std::invalid_argument("TensorTrain: needs at least one core");
  for (Index k = 0; k < cores_.size(); ++k) {
    const auto& c = cores_[k];
    if (c.rank() != 3) throw std::invalid_argument("TensorTrain: core " + std::to_string(k) + " is not rank 3");
    if (k + 1 < cores_.size() && c.dim(2) != cores_[k + 1].dim(0)) {
      throw std::invalid_argument("TensorTrain: bond mismatch between sites " + std::to_string(k) + " and " +
                                  std::to_string(k + 1));
    }
  }
  if (cores_.front().dim(0) != 1 || cores_.back().dim(2) != 1) {
    throw std::invalid_argument("TensorTrain: boundary bonds must have extent 1");
  }
  if (center_ && *center_ >= cores_.size()) throw std::invalid_argument("TensorTrain: center out of range");
}

TensorTrain TensorTrain::product_state(const std::vector<Index>& values, const std::vector<Index>& dims) {
  if (values.size() != dims.size()) throw std::invalid_argument("product_state: length mismatch");
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < dims.size(); ++k) {
    if (values[k] >= dims[k]) throw std::out_of_range("product_state: value exceeds physical extent");
    DenseTensor c({1, dims[k], 1});
    c({0, values[k], 0}) = 1.0;
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores), Index{0});
}

TensorTrain TensorTrain::product_state(const std::vector<Vector>& local) {
  std::vector<DenseTensor> cores;
  for (const auto& v : local) {
    DenseTensor c({1, static_cast<Index>(v.size()), 1});
    for (Eigen::Index s = 0; s < v.size(); ++s) c({0, static_cast<Index>(s), 0}) = v(s);
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain TensorTrain::constant(const std::vector<Index>& dims, Scalar value) {
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < dims.size(); ++k) {
    DenseTensor c({1, dims[k], 1});
    for (Index s = 0; s < dims[k]; ++s) c({0, s, 0}) = k == 0 ? value : Scalar(1);
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain TensorTrain::random(const std::vector<Index>& dims, Index chi, RandomSource& rng) {
  const Index n = dims.size();
  std::vector<Index> bonds(n + 1, 1);
  for (Index k = 1; k < n; ++k) {
    // cap by the largest rank the cut can support from either side
    double left = 1, right = 1;
    for (Index q = 0; q < k; ++q) left *= dims[q];
    for (Index q = k; q < n; ++q) right *= dims[q];
    bonds[k] = static_cast<Index>(std::min<double>({double(chi), left, right}));
  }
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < n; ++k) {
    DenseTensor c = rng.complex_tensor({bonds[k], dims[k], bonds[k + 1]});
    c.scale(1.0 / std::sqrt(double(bonds[k] * dims[k])));
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

// -------------------------------------------------------- TensorTrainOperator

TensorTrainOperator::TensorTrainOperator(std::vector<DenseTensor> cores) : cores_(std::move(cores)) { validate(); }

std::vector<Index> TensorTrainOperator::bond_dims() const {
  std::vector<Index> b;
  for (Index k = 0; k + 1 < cores_.size(); ++k) b.push_back(cores_[k].dim(3));
  return b;
}

Index TensorTrainOperator::max_bond() const {
  Index m = 1;
  for (Index b : bond_dims()) m = std::max(m, b);
  return m;
}

void TensorTrainOperator::validate() const {
  if (cores_.empty()) throw std::invalid_argument("TensorTrainOperator: needs at least one core");
  for (Index k = 0; k < cores_.size(); ++k) {
    const auto& c = cores_[k];
    if (c.rank() != 4) throw std::invalid_argument("TensorTrainOperator: core " + std::to_string(k) + " is not rank 4");
    if (k + 1 < cores_.size() && c.dim(3) != cores_[k + 1].dim(0)) {
      throw std::invalid_argument("TensorTrainOperator: bond mismatch after site " + std::to_string(k));
    }
  }
  if (cores_.front().dim(0) != 1 || cores_.back().dim(3) != 1) {
    throw std::invalid_argument("TensorTrainOperator: boundary bonds must have extent 1");
  }
}

TensorTrainOperator TensorTrainOperator::identity(const std::vector<Index>& dims) {
  std::vector<DenseTensor> cores;
  for (Index d : dims) cores.push_back(env::identity_core(d));
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator TensorTrainOperator::product(const std::vector<Matrix>& local) {
  std::vector<DenseTensor> cores;
  for (const auto& m : local) {
    cores.push_back(DenseTensor::from_matrix(m, {1, static_cast<Index>(m.rows()), static_cast<Index>(m.cols()), 1}));
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator TensorTrainOperator::random(const std::vector<Index>& dims, Index chi, RandomSource& rng) {
  const Index n = dims.size();
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < n; ++k) {
    Index l = k == 0 ? 1 : chi, r = k + 1 == n ? 1 : chi;
    DenseTensor c = rng.complex_tensor({l, dims[k], dims[k], r});
    c.scale(1.0 / std::sqrt(double(l * dims[k])));
    cores.push_back(std::move(c));
  }
  return TensorTrainOperator(std::move(cores));
}

// ------------------------------------------------------------ conversions

TensorTrain from_dense(const DenseTensor& v, const TruncationSpec& spec) {
  const Index n = v.rank();
  if (n == 0) throw std::invalid_argument("from_dense: tensor must have at least one axis");
  std::vector<DenseTensor> cores;
  Matrix rest = v.matrix(n);  // column vector, reshaped below
  Index left = 1;
  for (Index k = 0; k + 1 < n; ++k) {
    const Index d = v.dim(k);
    const Index cols = rest.size() / (left * d);
    Matrix m = Eigen::Map<const Matrix>(rest.data(), static_cast<Eigen::Index>(left * d), static_cast<Eigen::Index>(cols));
    MatrixSvd svd = svd_matrix(m, spec, 1);
    const Index kept = svd.s.size();
    cores.push_back(core_from(svd.u, left, d, kept));
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(svd.s.data(), static_cast<Eigen::Index>(kept));
    rest = s.cast<Scalar>().asDiagonal() * svd.vh;
    left = kept;
  }
  cores.push_back(core_from(rest, left, v.dim(n - 1), 1));
  return TensorTrain(std::move(cores), n - 1);
}

DenseTensor to_dense(const TensorTrain& tt) {
  Matrix acc = Matrix::Ones(1, 1);  // (prefix index) x (bond)
  for (const auto& c : tt.cores()) {
    Matrix next = acc * c.matrix(1);  // prefix x (d r)
    acc = Eigen::Map<const Matrix>(next.data(), next.rows() * static_cast<Eigen::Index>(c.dim(1)),
                                   static_cast<Eigen::Index>(c.dim(2)));
  }
  return DenseTensor::from_matrix(acc, tt.physical_dims());
}

Matrix to_dense(const TensorTrainOperator& op) {
  // acc has extents (out prefix, in prefix, bond)
  DenseTensor acc({1, 1, 1}, {Scalar(1)});
  for (const auto& c : op.cores()) {
    DenseTensor t = contract(acc, c, {{2, 0}});  // O I o i r
    t = permute(t, {0, 2, 1, 3, 4});             // O o I i r
    acc = t.reshaped({t.dim(0) * t.dim(1), t.dim(2) * t.dim(3), t.dim(4)});
  }
  return acc.to_matrix(1);
}

TensorTrainOperator operator_from_dense(const Matrix& m, const std::vector<Index>& dims, const TruncationSpec& spec) {
  const Index n = dims.size();
  const Index total = product(dims);
  if (static_cast<Index>(m.rows()) != total || static_cast<Index>(m.cols()) != total) {
    throw std::invalid_argument("operator_from_dense: matrix size does not match extents");
  }
  std::vector<Index> ext(dims);
  ext.insert(ext.end(), dims.begin(), dims.end());
  DenseTensor t = DenseTensor::from_matrix(m, ext);
  std::vector<Index> perm;
  for (Index k = 0; k < n; ++k) {
    perm.push_back(k);
    perm.push_back(n + k);
  }
  t = permute(t, perm);
  std::vector<Index> fused;
  for (Index d : dims) fused.push_back(d * d);
  TensorTrain tt = from_dense(t.reshaped(fused), spec);
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < n; ++k) {
    const DenseTensor& c = tt.core(k);
    cores.push_back(c.reshaped({c.dim(0), dims[k], dims[k], c.dim(2)}));
  }
  return TensorTrainOperator(std::move(cores));
}

Scalar evaluate(const TensorTrain& tt, const std::vector<Index>& indices) {
  if (indices.size() != tt.size()) throw std::invalid_argument("evaluate: index count must equal site count");
  Eigen::RowVectorX<Scalar> v = Eigen::RowVectorX<Scalar>::Ones(1);
  for (Index k = 0; k < tt.size(); ++k) {
    if (indices[k] >= tt.physical_dim(k)) throw std::out_of_range("evaluate: index exceeds physical extent");
    v = v * slice(tt.core(k), indices[k]);
  }
  return v(0);
}

// ------------------------------------------------------------ canonical forms

void canonicalize(TensorTrain& tt, Index center) {
  if (center >= tt.size()) throw std::out_of_range("canonicalize: center out of range");
  auto& cores = tt.cores();
  for (Index k = 0; k < center; ++k) left_orthogonalize(cores, k);
  for (Index k = tt.size() - 1; k > center; --k) right_orthogonalize(cores, k);
  tt.set_center(center);
}

void move_center(TensorTrain& tt, Index center) {
  if (center >= tt.size()) throw std::out_of_range("move_center: center out of range");
  if (!tt.center()) {
    canonicalize(tt, center);
    return;
  }
  auto& cores = tt.cores();
  for (Index k = *tt.center(); k < center; ++k) left_orthogonalize(cores, k);
  for (Index k = *tt.center(); k > center; --k) right_orthogonalize(cores, k);
  tt.set_center(center);
}

CompressResult compress(const TensorTrain& tt, const TruncationSpec& spec) {
  CompressResult out{tt, 0.0};
  TensorTrain& t = out.train;
  const Index n = t.size();
  canonicalize(t, n - 1);
  const double total = t.core(n - 1).norm() * t.core(n - 1).norm();
  TruncationSpec bond_spec = spec;
  if (n > 1) bond_spec.tol = spec.tol / double(n - 1);
  double discarded = 0.0;
  auto& cores = t.cores();
  for (Index k = n - 1; k > 0; --k) {
    DenseTensor& c = cores[k];
    const Index d = c.dim(1), r = c.dim(2);
    MatrixSvd svd = svd_matrix(c.matrix(1), bond_spec, 1);
    const Index kept = svd.s.size();
    discarded += svd.discarded_weight * svd.total_weight;
    c = core_from(svd.vh, kept, d, r);
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(svd.s.data(), static_cast<Eigen::Index>(kept));
    DenseTensor& prev = cores[k - 1];
    Matrix merged = prev.matrix(2) * (svd.u * s.cast<Scalar>().asDiagonal());
    prev = core_from(merged, prev.dim(0), prev.dim(1), kept);
  }
  t.set_center(0);
  out.discarded_weight = total > 0.0 ? discarded / total : 0.0;
  return out;
}

TensorTrainOperator compress(const TensorTrainOperator& op, const TruncationSpec& spec) {
  return as_operator(compress(as_train(op), spec).train, op);
}

// ------------------------------------------------------------ contractions

Scalar inner(const TensorTrain& a, const TensorTrain& b) {
  require_same_shape(a, b, "inner");
  Matrix e = Matrix::Ones(1, 1);
  for (Index k = 0; k < a.size(); ++k) {
    const DenseTensor& ca = a.core(k);
    const DenseTensor& cb = b.core(k);
    Matrix t = e * cb.matrix(1);  // la x (d rb)
    Eigen::Map<const Matrix> tf(t.data(), static_cast<Eigen::Index>(ca.dim(0) * ca.dim(1)),
                                static_cast<Eigen::Index>(cb.dim(2)));
    e = ca.matrix(2).adjoint() * tf;
  }
  return e(0, 0);
}

double norm(const TensorTrain& tt) {
  if (tt.center()) return tt.core(*tt.center()).norm();
  // sqrt(<t|t>) loses everything below ~1e-8 relative to cancellation.
  TensorTrain copy = tt;
  canonicalize(copy, copy.size() - 1);
  return copy.core(copy.size() - 1).norm();
}

void normalize(TensorTrain& tt) {
  const double nrm = norm(tt);
  if (nrm == 0.0) throw std::runtime_error("normalize: zero-norm train");
  Index k = tt.center().value_or(0);
  tt.core(k).scale(1.0 / nrm);
}

TensorTrain scaled(const TensorTrain& tt, Scalar s) {
  TensorTrain out = tt;
  out.core(tt.center().value_or(0)).scale(s);
  return out;
}

Scalar sandwich(const TensorTrain& a, const TensorTrainOperator& op, const TensorTrain& b) {
  if (a.size() != op.size() || b.size() != op.size()) throw std::invalid_argument("sandwich: site count mismatch");
  DenseTensor e = env::trivial();
  for (Index k = 0; k < op.size(); ++k) e = env::extend_left(e, a.core(k), op.core(k), b.core(k));
  return e.data()[0];
}

Scalar expectation(const TensorTrainOperator& op, const TensorTrain& psi) {
  return sandwich(psi, op, psi) / inner(psi, psi);
}

Scalar expect_local(const TensorTrain& psi, const std::map<Index, Matrix>& ops) {
  std::vector<Matrix> local;
  for (Index k = 0; k < psi.size(); ++k) local.push_back(Matrix::Identity(psi.physical_dim(k), psi.physical_dim(k)));
  for (const auto& [site, m] : ops) {
    if (site >= psi.size()) throw std::out_of_range("expect_local: site out of range");
    if (static_cast<Index>(m.rows()) != psi.physical_dim(site) || m.rows() != m.cols()) {
      throw std::invalid_argument("expect_local: operator shape does not match physical extent");
    }
    local[site] = m;
  }
  return expectation(TensorTrainOperator::product(local), psi);
}

std::vector<double> schmidt_values(const TensorTrain& tt, Index bond) {
  if (bond + 1 >= tt.size()) throw std::out_of_range("schmidt_values: bond out of range");
  TensorTrain t = tt;
  move_center(t, bond);
  Eigen::BDCSVD<Matrix> svd(t.core(bond).matrix(2));
  const auto& s = svd.singularValues();
  const double nrm = s.norm();
  std::vector<double> out;
  for (Eigen::Index i = 0; i < s.size(); ++i) out.push_back(nrm > 0 ? s(i) / nrm : 0.0);
  return out;
}

double entanglement_entropy(const TensorTrain& tt, Index bond) {
  double h = 0.0;
  for (double s : schmidt_values(tt, bond)) {
    const double p = s * s;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// ------------------------------------------------------------ sampling

namespace {

std::vector<Index> draw(const TensorTrain& t, RandomSource& rng) {
  std::vector<Index> out(t.size());
  Eigen::RowVectorX<Scalar> v = Eigen::RowVectorX<Scalar>::Ones(1);
  for (Index k = 0; k < t.size(); ++k) {
    const Index d = t.physical_dim(k);
    std::vector<Eigen::RowVectorX<Scalar>> w(d);
    std::vector<double> p(d);
    double total = 0.0;
    for (Index s = 0; s < d; ++s) {
      w[s] = v * slice(t.core(k), s);
      p[s] = w[s].squaredNorm();
      total += p[s];
    }
    double u = rng.uniform() * total;
    Index pick = d - 1;
    for (Index s = 0; s < d; ++s) {
      if (u < p[s]) {
        pick = s;
        break;
      }
      u -= p[s];
    }
    while (p[pick] == 0.0 && pick > 0) --pick;
    out[k] = pick;
    v = w[pick] / std::sqrt(p[pick]);
  }
  return out;
}

TensorTrain prepared_for_sampling(const TensorTrain& tt) {
  TensorTrain t = tt;
  move_center(t, 0);
  const double n2 = t.core(0).norm() * t.core(0).norm();
  if (std::abs(n2 - 1.0) > 1e-8) {
    throw std::invalid_argument("sample: train norm squared is " + std::to_string(n2) + ", expected 1");
  }
  return t;
}

}  // namespace

std::vector<Index> sample(const TensorTrain& tt, RandomSource& rng) {
  return draw(prepared_for_sampling(tt), rng);
}

std::vector<std::vector<Index>> sample_many(const TensorTrain& tt, RandomSource& rng, Index count) {
  TensorTrain t = prepared_for_sampling(tt);
  std::vector<std::vector<Index>> out;
  out.reserve(count);
  for (Index q = 0; q < count; ++q) out.push_back(draw(t, rng));
  return out;
}

// ------------------------------------------------------------ arithmetic

TensorTrain add(const TensorTrain& a, const TensorTrain& b) {
  require_same_shape(a, b, "add");
  const Index n = a.size();
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < n; ++k) {
    const DenseTensor& ca = a.core(k);
    const DenseTensor& cb = b.core(k);
    const Index d = ca.dim(1);
    const bool first = k == 0, last = k + 1 == n;
    const Index l = first ? 1 : ca.dim(0) + cb.dim(0);
    const Index r = last ? 1 : ca.dim(2) + cb.dim(2);
    const Index la_off = 0, lb_off = first ? 0 : ca.dim(0);
    const Index ra_off = 0, rb_off = last ? 0 : ca.dim(2);
    DenseTensor c({l, d, r});
    for (Index s = 0; s < d; ++s) {
      for (Index i = 0; i < ca.dim(0); ++i)
        for (Index j = 0; j < ca.dim(2); ++j) c({la_off + i, s, ra_off + j}) += ca({i, s, j});
      for (Index i = 0; i < cb.dim(0); ++i)
        for (Index j = 0; j < cb.dim(2); ++j) c({lb_off + i, s, rb_off + j}) += cb({i, s, j});
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain subtract(const TensorTrain& a, const TensorTrain& b) { return add(a, scaled(b, -1.0)); }

TensorTrain hadamard_product(const TensorTrain& a, const TensorTrain& b) {
  require_same_shape(a, b, "hadamard_product");
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < a.size(); ++k) {
    const DenseTensor& ca = a.core(k);
    const DenseTensor& cb = b.core(k);
    const Index la = ca.dim(0), lb = cb.dim(0), ra = ca.dim(2), rb = cb.dim(2), d = ca.dim(1);
    DenseTensor c({la * lb, d, ra * rb});
    for (Index s = 0; s < d; ++s) {
      Matrix kron(static_cast<Eigen::Index>(la * lb), static_cast<Eigen::Index>(ra * rb));
      Matrix sa = slice(ca, s), sb = slice(cb, s);
      for (Index i = 0; i < la; ++i)
        for (Index j = 0; j < ra; ++j)
          kron.block(static_cast<Eigen::Index>(i * lb), static_cast<Eigen::Index>(j * rb), static_cast<Eigen::Index>(lb),
                     static_cast<Eigen::Index>(rb)) = sa(i, j) * sb;
      for (Index i = 0; i < la * lb; ++i)
        for (Index j = 0; j < ra * rb; ++j) c({i, s, j}) = kron(i, j);
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrainOperator add(const TensorTrainOperator& a, const TensorTrainOperator& b) {
  if (a.size() != b.size()) throw std::invalid_argument("add: operator site counts differ");
  for (Index k = 0; k < a.size(); ++k) {
    if (a.out_dim(k) != b.out_dim(k) || a.in_dim(k) != b.in_dim(k)) {
      throw std::invalid_argument("add: operator physical extents differ");
    }
  }
  return as_operator(add(as_train(a), as_train(b)), a);
}

TensorTrainOperator scaled(const TensorTrainOperator& op, Scalar s) {
  TensorTrainOperator out = op;
  out.core(0).scale(s);
  return out;
}

TensorTrainOperator adjoint(const TensorTrainOperator& op) {
  std::vector<DenseTensor> cores;
  for (const auto& c : op.cores()) cores.push_back(permute(c, {0, 2, 1, 3}).conj());
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator diagonal_operator(const TensorTrain& diag) {
  std::vector<DenseTensor> cores;
  for (const auto& c : diag.cores()) {
    const Index l = c.dim(0), d = c.dim(1), r = c.dim(2);
    DenseTensor w({l, d, d, r});
    for (Index i = 0; i < l; ++i)
      for (Index s = 0; s < d; ++s)
        for (Index j = 0; j < r; ++j) w({i, s, s, j}) = c({i, s, j});
    cores.push_back(std::move(w));
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator op_product(const TensorTrainOperator& a, const TensorTrainOperator& b, const TruncationSpec& spec) {
  if (a.size() != b.size()) throw std::invalid_argument("op_product: site counts differ");
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < a.size(); ++k) {
    const DenseTensor& ca = a.core(k);
    const DenseTensor& cb = b.core(k);
    if (ca.dim(2) != cb.dim(1)) throw std::invalid_argument("op_product: inner physical extents differ");
    DenseTensor t = contract(ca, cb, {{2, 1}});  // la o ra lb i rb
    t = permute(t, {0, 3, 1, 4, 2, 5});          // la lb o i ra rb
    cores.push_back(t.reshaped({ca.dim(0) * cb.dim(0), ca.dim(1), cb.dim(2), ca.dim(3) * cb.dim(3)}));
  }
  TensorTrainOperator prod(std::move(cores));
  return compress(prod, spec);
}

// ------------------------------------------------------------ zip-up

ApplyResult apply_zipup(const TensorTrainOperator& op, const TensorTrain& v, const TruncationSpec& spec) {
  if (op.size() != v.size()) throw std::invalid_argument("apply_zipup: site count mismatch");
  const Index n = v.size();
  ApplyResult out;
  std::vector<DenseTensor> cores;
  DenseTensor carry = env::trivial();  // (new bond, operator bond, state bond)
  for (Index k = 0; k < n; ++k) {
    const DenseTensor& w = op.core(k);
    const DenseTensor& m = v.core(k);
    if (w.dim(2) != m.dim(1)) throw std::invalid_argument("apply_zipup: physical extent mismatch at site " + std::to_string(k));
    DenseTensor t = contract(carry, m, {{2, 0}});  // c w i r'
    t = contract(t, w, {{1, 0}, {2, 2}});          // c r' o w'
    t = permute(t, {0, 2, 3, 1});                  // c o w' r'
    if (k + 1 == n) {
      cores.push_back(t.reshaped({t.dim(0), t.dim(1), 1}));
      break;
    }
    Factorization f = svd_truncate(t, 2, spec, Absorb::Right, 1);
    out.discarded_weight += f.discarded_weight;
    cores.push_back(f.left);
    carry = f.right;  // (k', w', r')
  }
  out.train = TensorTrain(std::move(cores), n - 1);
  return out;
}

// ------------------------------------------------------------ fitting

FitResult fit_apply(const TensorTrainOperator& op, const TensorTrain& v, const TensorTrain& guess,
                    const FitOptions& options) {
  const Index n = v.size();
  if (op.size() != n || guess.size() != n) throw std::invalid_argument("fit_apply: site count mismatch");
  const double target2 = sandwich(v, op_product(adjoint(op), op), v).real();
  if (!(target2 > 0.0)) throw std::runtime_error("fit_apply: target has zero norm");

  FitResult res;
  TensorTrain psi = guess;
  canonicalize(psi, 0);
  auto& c = psi.cores();
  std::vector<DenseTensor> left(n + 1), right(n + 1);
  left[0] = env::trivial();
  right[n] = env::trivial();
  for (Index k = n - 1; k >= 1; --k) right[k] = env::extend_right(right[k + 1], c[k], op.core(k), v.core(k));

  const bool two_site = options.mode == FitMode::TwoSite && n > 1;
  const bool enrich = options.mode == FitMode::OneSiteEnriched;
  auto record = [&](double kept) { res.fidelity_history.push_back(kept / target2); };

  auto one_site_update = [&](Index k) {
    c[k] = env::apply1(left[k], op.core(k), right[k + 1], v.core(k));
    const double w = c[k].norm();
    record(w * w);
  };

  for (Index sweep = 0; sweep < options.sweeps; ++sweep) {
    if (two_site) {
      for (Index k = 0; k + 1 < n; ++k) {
        DenseTensor x = contract(v.core(k), v.core(k + 1), {{2, 0}});
        DenseTensor t = env::apply2(left[k], op.core(k), op.core(k + 1), right[k + 2], x);
        Factorization f = svd_truncate(t, 2, TruncationSpec::rank(options.max_rank), Absorb::Right, 1);
        c[k] = f.left;
        c[k + 1] = f.right;
        double kept = 0.0;
        for (double s : f.singular_values) kept += s * s;
        record(kept);
        left[k + 1] = env::extend_left(left[k], c[k], op.core(k), v.core(k));
      }
      for (Index k = n - 1; k-- > 0;) {
        DenseTensor x = contract(v.core(k), v.core(k + 1), {{2, 0}});
        DenseTensor t = env::apply2(left[k], op.core(k), op.core(k + 1), right[k + 2], x);
        Factorization f = svd_truncate(t, 2, TruncationSpec::rank(options.max_rank), Absorb::Left, 1);
        c[k] = f.left;
        c[k + 1] = f.right;
        double kept = 0.0;
        for (double s : f.singular_values) kept += s * s;
        record(kept);
        right[k + 1] = env::extend_right(right[k + 2], c[k + 1], op.core(k + 1), v.core(k + 1));
      }
      continue;
    }
    for (Index k = 0; k + 1 < n; ++k) {
      one_site_update(k);
      const Index l = c[k].dim(0), d = c[k].dim(1);
      Matrix q, r;
      if (enrich) {
        qr_matrix_enriched(c[k].matrix(2), std::min(l * d, options.max_rank), q, r);
      } else {
        qr_matrix(c[k].matrix(2), q, r);
      }
      const Index m = static_cast<Index>(q.cols());
      c[k] = core_from(q, l, d, m);
      Matrix merged = r * c[k + 1].matrix(1);
      c[k + 1] = core_from(merged, m, c[k + 1].dim(1), c[k + 1].dim(2));
      left[k + 1] = env::extend_left(left[k], c[k], op.core(k), v.core(k));
    }
    for (Index k = n - 1; k > 0; --k) {
      one_site_update(k);
      const Index d = c[k].dim(1), rr = c[k].dim(2);
      Matrix q, r;
      if (enrich) {
        qr_matrix_enriched(c[k].matrix(1).adjoint(), std::min(d * rr, options.max_rank), q, r);
      } else {
        qr_matrix(c[k].matrix(1).adjoint(), q, r);
      }
      const Index m = static_cast<Index>(q.cols());
      Matrix qh = q.adjoint();
      c[k] = core_from(qh, m, d, rr);
      Matrix merged = c[k - 1].matrix(2) * r.adjoint();
      c[k - 1] = core_from(merged, c[k - 1].dim(0), c[k - 1].dim(1), m);
      right[k] = env::extend_right(right[k + 1], c[k], op.core(k), v.core(k));
    }
  }
  if (!two_site) one_site_update(0);
  psi.set_center(0);
  psi.validate();
  res.fidelity = res.fidelity_history.empty() ? 0.0 : res.fidelity_history.back();
  res.train = std::move(psi);
  return res;
}

}  // namespace tnkit
