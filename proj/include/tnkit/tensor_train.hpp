#pragma once

#include "tnkit/factorize.hpp"
#include "tnkit/random.hpp"
#include "tnkit/tensor.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tnkit {

// Matrix-product state. Core k has extents (left bond, physical, right bond);
// the outer bonds have extent 1. When `center` is set, cores left of it are
// left-isometric, cores right of it are right-isometric, and the center core
// carries the norm.
class TensorTrain {
 public:
  TensorTrain() = default;
  explicit TensorTrain(std::vector<DenseTensor> cores, std::optional<Index> center = std::nullopt);

  Index size() const { return cores_.size(); }
  const DenseTensor& core(Index k) const { return cores_.at(k); }
  DenseTensor& core(Index k) { return cores_.at(k); }
  const std::vector<DenseTensor>& cores() const { return cores_; }
  std::vector<DenseTensor>& cores() { return cores_; }

  std::optional<Index> center() const { return center_; }
  void set_center(std::optional<Index> c) { center_ = c; }

  Index physical_dim(Index k) const { return cores_.at(k).dim(1); }
  std::vector<Index> physical_dims() const;
  // Extents of the N-1 interior bonds.
  std::vector<Index> bond_dims() const;
  Index max_bond() const;
  void validate() const;

  static TensorTrain product_state(const std::vector<Index>& values, const std::vector<Index>& dims);
  static TensorTrain product_state(const std::vector<Vector>& local);
  static TensorTrain constant(const std::vector<Index>& dims, Scalar value);
  static TensorTrain random(const std::vector<Index>& dims, Index chi, RandomSource& rng);

 private:
  std::vector<DenseTensor> cores_;
  std::optional<Index> center_;
};

// Matrix-product operator with cores (left bond, out, in, right bond).
class TensorTrainOperator {
 public:
  TensorTrainOperator() = default;
  explicit TensorTrainOperator(std::vector<DenseTensor> cores);

  Index size() const { return cores_.size(); }
  const DenseTensor& core(Index k) const { return cores_.at(k); }
  DenseTensor& core(Index k) { return cores_.at(k); }
  const std::vector<DenseTensor>& cores() const { return cores_; }
  Index out_dim(Index k) const { return cores_.at(k).dim(1); }
  Index in_dim(Index k) const { return cores_.at(k).dim(2); }
  std::vector<Index> bond_dims() const;
  Index max_bond() const;
  void validate() const;

  static TensorTrainOperator identity(const std::vector<Index>& dims);
  // Product of single-site matrices.
  static TensorTrainOperator product(const std::vector<Matrix>& local);
  static TensorTrainOperator random(const std::vector<Index>& dims, Index chi, RandomSource& rng);

 private:
  std::vector<DenseTensor> cores_;
};

// Flat index convention for dense conversions: site 0 is the fastest index.
TensorTrain from_dense(const DenseTensor& v, const TruncationSpec& spec = TruncationSpec::exact());
DenseTensor to_dense(const TensorTrain& tt);
Matrix to_dense(const TensorTrainOperator& op);
TensorTrainOperator operator_from_dense(const Matrix& m, const std::vector<Index>& dims,
                                        const TruncationSpec& spec = TruncationSpec::exact());

Scalar evaluate(const TensorTrain& tt, const std::vector<Index>& indices);

// Gauge transformations; the represented tensor is unchanged.
void canonicalize(TensorTrain& tt, Index center);
void move_center(TensorTrain& tt, Index center);

struct CompressResult {
  TensorTrain train;
  double discarded_weight = 0.0;  // relative to the input norm squared
};

// Right-to-left truncated SVD sweep on a left-canonical copy. The per-bond
// tolerance is spec.tol / (N-1) so the total relative discarded weight stays
// within spec.tol. The result has its center at site 0.
CompressResult compress(const TensorTrain& tt, const TruncationSpec& spec);
TensorTrainOperator compress(const TensorTrainOperator& op, const TruncationSpec& spec);

Scalar inner(const TensorTrain& a, const TensorTrain& b);  // <a|b>
double norm(const TensorTrain& tt);
void normalize(TensorTrain& tt);
TensorTrain scaled(const TensorTrain& tt, Scalar s);

// <a|op|b>
Scalar sandwich(const TensorTrain& a, const TensorTrainOperator& op, const TensorTrain& b);
// <psi|op|psi> / <psi|psi>
Scalar expectation(const TensorTrainOperator& op, const TensorTrain& psi);
// Product of single-site operators keyed by site, normalized by <psi|psi>.
Scalar expect_local(const TensorTrain& psi, const std::map<Index, Matrix>& ops);

std::vector<double> schmidt_values(const TensorTrain& tt, Index bond);
// Von Neumann entropy across the bond between sites `bond` and `bond + 1`.
double entanglement_entropy(const TensorTrain& tt, Index bond);

// Draws one configuration from |psi|^2. Requires a unit norm to 1e-8.
std::vector<Index> sample(const TensorTrain& tt, RandomSource& rng);
std::vector<std::vector<Index>> sample_many(const TensorTrain& tt, RandomSource& rng, Index count);

TensorTrain add(const TensorTrain& a, const TensorTrain& b);
TensorTrain subtract(const TensorTrain& a, const TensorTrain& b);
TensorTrain hadamard_product(const TensorTrain& a, const TensorTrain& b);

TensorTrainOperator add(const TensorTrainOperator& a, const TensorTrainOperator& b);
TensorTrainOperator scaled(const TensorTrainOperator& op, Scalar s);
TensorTrainOperator adjoint(const TensorTrainOperator& op);
// Diagonal operator whose diagonal is the given train.
TensorTrainOperator diagonal_operator(const TensorTrain& diag);
// Operator product a * b, compressed under spec.
TensorTrainOperator op_product(const TensorTrainOperator& a, const TensorTrainOperator& b,
                               const TruncationSpec& spec = TruncationSpec::exact());

struct ApplyResult {
  TensorTrain train;
  double discarded_weight = 0.0;  // sum of relative weights dropped per split
};

// op|v> by a single left-to-right zip-up with truncated SVD splits. The result
// is left-canonical with its center on the last site.
ApplyResult apply_zipup(const TensorTrainOperator& op, const TensorTrain& v, const TruncationSpec& spec);

enum class FitMode { OneSite, OneSiteEnriched, TwoSite };

struct FitOptions {
  FitMode mode = FitMode::OneSite;
  Index max_rank = 16;
  Index sweeps = 2;
};

struct FitResult {
  TensorTrain train;
  double fidelity = 0.0;                 // |<target|fit>|^2 / (<target|target><fit|fit>)
  std::vector<double> fidelity_history;  // after every local update
};

// Variational fit of op|v> starting from guess.
FitResult fit_apply(const TensorTrainOperator& op, const TensorTrain& v, const TensorTrain& guess,
                    const FitOptions& options);

}  // namespace tnkit
