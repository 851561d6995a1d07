#pragma once

#include "tnkit/cross.hpp"
#include "tnkit/random.hpp"
#include "tnkit/tensor_train.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tnkit {

using MultiIndex = std::vector<Index>;
using TciOracle = std::function<Scalar(const MultiIndex&)>;

std::string format_multi_index(const MultiIndex& idx);

// Raised when the oracle throws or returns a non-finite value.
class OracleError : public std::runtime_error {
 public:
  OracleError(const std::string& what, MultiIndex index)
      : std::runtime_error(what + " at " + format_multi_index(index)), index_(std::move(index)) {}
  const MultiIndex& index() const { return index_; }

 private:
  MultiIndex index_;
};

// Raised when neither the initial point nor any probe gives a nonzero value.
class ZeroTensorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PivotSearch {
  Full,  // every entry of the Pi block is evaluated
  Rook,  // alternating row/column maximization on lazily evaluated entries
};

struct TciOptions {
  double tol = 1e-10;  // pivot threshold relative to the largest |F| sampled
  Index max_rank = 64;
  Index max_sweeps = 20;
  // Add pivots on a bond until its residual drops below tol instead of one
  // pivot per visit.
  bool greedy = false;
  std::optional<MultiIndex> initial;  // all zeros when unset
  PivotSearch search = PivotSearch::Full;
  Index rook_iterations = 8;
  // Random points checked against the interpolant whenever a sweep adds no
  // pivot; points with large error become global pivots. 0 disables.
  Index global_samples = 0;
};

// Nested cross interpolation of an N-index tensor. Bond b (1..N-1) couples
// sites b-1 and b; rows(b) holds the prefixes I_b (length b) and cols(b) the
// suffixes J_b (length N-b). The Pi block of bond b is indexed by
// (sigma + d * i) x (sigma' + d' * j) for i in I_{b-1}, j in J_{b+1}.
class TciState {
 public:
  TciState(TciOracle oracle, std::vector<Index> extents, const TciOptions& options = {});

  Index size() const { return extents_.size(); }
  const std::vector<Index>& extents() const { return extents_; }
  const TciOptions& options() const { return options_; }

  // One forward and one backward pass over the bonds, followed by a global
  // search when nothing was added; returns the number of pivots added.
  Index sweep();
  // Inserts the prefixes and suffixes of x on every bond that lacks them.
  // Skipped (returns false) when x already lies in a cross, when a bond is at
  // max_rank, or when any bond's Schur residual at x is below
  // max(min_residual, tol * max|F|).
  bool add_global_pivot(const MultiIndex& x, double min_residual = 0.0);
  // Samples global_samples random points and inserts those the interpolant
  // misses; returns the number inserted.
  Index global_search();
  Index sweeps_done() const { return sweeps_; }
  bool converged() const { return converged_; }

  const std::vector<MultiIndex>& rows(Index bond) const { return rows_.at(bond); }
  const std::vector<MultiIndex>& cols(Index bond) const { return cols_.at(bond); }
  std::vector<Index> ranks() const;
  // Max |residual| on the bond's Pi block after its last update. Under rook
  // search this is the largest residual the search visited.
  double pivot_error(Index bond) const { return blocks_.at(bond).error; }
  double max_pivot_error() const;
  double max_sample() const { return max_abs_; }
  Index oracle_calls() const { return calls_; }

  bool nesting_holds() const;

  // Brings every Pi block up to date (may query the oracle) and assembles
  // cores T_k P_{k+1}^-1.
  TensorTrain to_tt();
  Scalar evaluate(const MultiIndex& sigma);

 private:
  struct Block {
    Matrix values;  // full search only
    std::unordered_map<std::uint64_t, Scalar> sparse;  // rook search only
    Index row_parents = 0;  // |I_{b-1}| covered by `values`
    Index col_parents = 0;  // |J_{b+1}| covered
    std::vector<Index> pivot_rows;
    std::vector<Index> pivot_cols;
    double error = 0.0;
  };

  Scalar call(const MultiIndex& idx);
  void refresh(Index bond);
  Index update(Index bond);
  Index update_rook(Index bond);
  Scalar entry(Index bond, Index row, Index col);
  Index block_rows(Index bond) const;
  Index block_cols(Index bond) const;
  void initialize();
  PivotLu pivot_lu(Index bond);

  TciOracle oracle_;
  std::vector<Index> extents_;
  TciOptions options_;
  std::vector<std::vector<MultiIndex>> rows_;  // index 0..N
  std::vector<std::vector<MultiIndex>> cols_;
  std::vector<Block> blocks_;  // index 1..N-1 used
  Index calls_ = 0;
  double max_abs_ = 0.0;
  Index sweeps_ = 0;
  bool converged_ = false;
  std::optional<TensorTrain> cached_tt_;
  RandomSource rng_{0x7c2};
  RandomSource global_rng_{0x7c3};
};

// Runs sweeps until one adds no pivot or max_sweeps is reached.
TciState tci_build(TciOracle oracle, std::vector<Index> extents, const TciOptions& options = {});

struct QuadratureRule {
  std::string label;
  std::vector<double> nodes;  // strictly increasing in [-1, 1]
  std::vector<double> weights;
  Index size() const { return nodes.size(); }
};

// "gk15", "gk21", "gk41", "gk61" or "trap:N" (N >= 2 equispaced points).
QuadratureRule quadrature_rule(std::string_view kind);
QuadratureRule gauss_kronrod(Index points);
QuadratureRule trapezoidal(Index points);

struct IntegrationResult {
  Scalar value = 0.0;
  Index evaluations = 0;
  Index max_rank = 0;
  bool converged = false;
  // (oracle calls so far, estimate) after each sweep.
  std::vector<std::pair<Index, Scalar>> trace;
};

// Integral of f over [lo, hi]^dims on the product grid of `rule`. The initial
// pivot defaults to the middle node in every direction.
IntegrationResult integrate(const std::function<Scalar(const std::vector<double>&)>& f, Index dims, double lo,
                            double hi, const QuadratureRule& rule, const TciOptions& options = {});

// Contracts each core with its own weight vector.
Scalar weighted_sum(const TensorTrain& tt, const std::vector<std::vector<double>>& weights);

}  // namespace tnkit
