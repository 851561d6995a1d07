#include "tnkit/tci.hpp"

#include "tnkit/random.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <sstream>

namespace tnkit {

#include "quadrature_tables.inc"

std::string format_multi_index(const MultiIndex& idx) {
  std::ostringstream os;
  os << '(';
  for (Index k = 0; k < idx.size(); ++k) os << (k ? "," : "") << idx[k];
  os << ')';
  return os.str();
}

namespace {

MultiIndex concat(const MultiIndex& prefix, std::initializer_list<Index> middle, const MultiIndex& suffix) {
  MultiIndex out;
  out.reserve(prefix.size() + middle.size() + suffix.size());
  out.insert(out.end(), prefix.begin(), prefix.end());
  out.insert(out.end(), middle.begin(), middle.end());
  out.insert(out.end(), suffix.begin(), suffix.end());
  return out;
}

constexpr Index kProbeLimit = 4096;
// Residuals below this fraction of max|F| are rounding noise, never pivots.
constexpr double kResidualFloor = 1e-14;
constexpr std::uint64_t kProbeSeed = 0x7c1;
// A global pivot is kept only if every bond's Schur residual is at least this
// fraction of the interpolation error at the point; smaller ones make the
// pivot matrices ill-conditioned.
constexpr double kGlobalSchurRatio = 1e-2;

}  // namespace

// ------------------------------------------------------------ state

TciState::TciState(TciOracle oracle, std::vector<Index> extents, const TciOptions& options)
    : oracle_(std::move(oracle)), extents_(std::move(extents)), options_(options) {
  if (!oracle_) throw std::invalid_argument("tci: oracle is empty");
  if (extents_.empty()) throw std::invalid_argument("tci: need at least one index");
  for (Index d : extents_)
    if (d == 0) throw std::invalid_argument("tci: extents must be positive");
  if (options_.max_rank == 0) throw std::invalid_argument("tci: max_rank must be positive");
  initialize();
}

Scalar TciState::call(const MultiIndex& idx) {
  Scalar v;
  try {
    v = oracle_(idx);
  } catch (const OracleError&) {
    throw;
  } catch (const std::exception& e) {
    throw OracleError(std::string("oracle failed: ") + e.what(), idx);
  }
  ++calls_;
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw OracleError("oracle returned a non-finite value", idx);
  max_abs_ = std::max(max_abs_, std::abs(v));
  return v;
}

void TciState::initialize() {
  const Index n = size();
  MultiIndex x = options_.initial.value_or(MultiIndex(n, 0));
  if (x.size() != n) throw std::invalid_argument("tci: initial point has wrong length");
  for (Index k = 0; k < n; ++k)
    if (x[k] >= extents_[k]) throw std::out_of_range("tci: initial point out of range at index " + std::to_string(k));
  if (call(x) == Scalar(0)) {
    RandomSource rng(kProbeSeed);
    bool found = false;
    for (Index probe = 0; probe < kProbeLimit && !found; ++probe) {
      MultiIndex y(n);
      for (Index k = 0; k < n; ++k) y[k] = rng.below(extents_[k]);
      if (call(y) != Scalar(0)) {
        x = y;
        found = true;
      }
    }
    if (!found) throw ZeroTensorError("tci: no nonzero entry found to start from");
  }
  rows_.assign(n + 1, {});
  cols_.assign(n + 1, {});
  for (Index b = 0; b <= n; ++b) {
    rows_[b].push_back(MultiIndex(x.begin(), x.begin() + b));
    cols_[b].push_back(MultiIndex(x.begin() + b, x.end()));
  }
  blocks_.assign(n + 1, Block{});
  for (Index b = 1; b < n; ++b) {
    blocks_[b].pivot_rows = {x[b - 1]};
    blocks_[b].pivot_cols = {x[b]};
  }
}

void TciState::refresh(Index b) {
  Block& blk = blocks_[b];
  const Index d1 = extents_[b - 1], d2 = extents_[b];
  const Index ni = rows_[b - 1].size(), nj = cols_[b + 1].size();
  if (ni == blk.row_parents && nj == blk.col_parents) return;
  const Index m0 = d1 * blk.row_parents, n0 = d2 * blk.col_parents;
  const Index m = d1 * ni, n = d2 * nj;
  blk.values.conservativeResize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Index c = 0; c < n; ++c) {
    const Index j = c / d2, s2 = c % d2;
    for (Index r = (c < n0 ? m0 : 0); r < m; ++r) {
      const Index i = r / d1, s1 = r % d1;
      blk.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          call(concat(rows_[b - 1][i], {s1, s2}, cols_[b + 1][j]));
    }
  }
  blk.row_parents = ni;
  blk.col_parents = nj;
}

Index TciState::block_rows(Index b) const { return extents_[b - 1] * rows_[b - 1].size(); }
Index TciState::block_cols(Index b) const { return extents_[b] * cols_[b + 1].size(); }

Scalar TciState::entry(Index b, Index r, Index c) {
  Block& blk = blocks_[b];
  if (static_cast<Eigen::Index>(r) < blk.values.rows() && static_cast<Eigen::Index>(c) < blk.values.cols())
    return blk.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  const std::uint64_t key = (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint64_t>(c);
  auto it = blk.sparse.find(key);
  if (it != blk.sparse.end()) return it->second;
  const Index d1 = extents_[b - 1], d2 = extents_[b];
  const Scalar v = call(concat(rows_[b - 1][r / d1], {r % d1, c % d2}, cols_[b + 1][c / d2]));
  blk.sparse.emplace(key, v);
  return v;
}

PivotLu TciState::pivot_lu(Index b) {
  const Block& blk = blocks_[b];
  const Index r = blk.pivot_rows.size();
  Matrix p(r, r);
  for (Index a = 0; a < r; ++a)
    for (Index c = 0; c < r; ++c) p(a, c) = entry(b, blk.pivot_rows[a], blk.pivot_cols[c]);
  return factor_in_pivot_order(p);
}

Index TciState::update_rook(Index b) {
  Block& blk = blocks_[b];
  const Index m = block_rows(b), n = block_cols(b);
  const Index d1 = extents_[b - 1], d2 = extents_[b];
  const Index cap = std::min({options_.max_rank, m, n});
  Index added = 0;
  while (true) {
    const Index r = blk.pivot_rows.size();
    Matrix cj(m, r), ri(r, n);
    for (Index a = 0; a < r; ++a) {
      for (Index row = 0; row < m; ++row) cj(row, a) = entry(b, row, blk.pivot_cols[a]);
      for (Index col = 0; col < n; ++col) ri(a, col) = entry(b, blk.pivot_rows[a], col);
    }
    const Matrix left = apply_pivot_inverse(pivot_lu(b), cj, Side::Right);  // Pi(:, J) P^-1
    auto residual = [&](Index row, Index col) { return entry(b, row, col) - (left.row(row) * ri.col(col)).value(); };

    Index col = rng_.below(n), best_row = 0, best_col = col;
    double best = 0.0;
    for (Index it = 0; it < std::max<Index>(1, options_.rook_iterations); ++it) {
      double col_best = -1.0;
      for (Index row = 0; row < m; ++row) {
        const double v = std::abs(residual(row, col));
        if (v > col_best) {
          col_best = v;
          best_row = row;
        }
      }
      double row_best = -1.0;
      for (Index c = 0; c < n; ++c) {
        const double v = std::abs(residual(best_row, c));
        if (v > row_best) {
          row_best = v;
          best_col = c;
        }
      }
      best = row_best;
      if (best_col == col) break;
      col = best_col;
    }
    blk.error = best;
    if (!(best > std::max(options_.tol, kResidualFloor) * max_abs_) || r >= cap) break;
    blk.pivot_rows.push_back(best_row);
    blk.pivot_cols.push_back(best_col);
    rows_[b].push_back(concat(rows_[b - 1][best_row / d1], {best_row % d1}, {}));
    cols_[b].push_back(concat({}, {best_col % d2}, cols_[b + 1][best_col / d2]));
    ++added;
    if (!options_.greedy) break;
  }
  return added;
}

Index TciState::update(Index b) {
  if (options_.search == PivotSearch::Rook) return update_rook(b);
  refresh(b);
  Block& blk = blocks_[b];
  const Eigen::Index m = blk.values.rows(), n = blk.values.cols();
  const Index r = blk.pivot_rows.size();
  Matrix c(m, r), rr(r, n);
  for (Index a = 0; a < r; ++a) {
    c.col(a) = blk.values.col(blk.pivot_cols[a]);
    rr.row(a) = blk.values.row(blk.pivot_rows[a]);
  }
  Matrix residual = blk.values - apply_pivot_inverse(pivot_lu(b), c, Side::Right) * rr;

  const Index d1 = extents_[b - 1], d2 = extents_[b];
  const Index cap = std::min<Index>(options_.max_rank, static_cast<Index>(std::min(m, n)));
  Index added = 0;
  while (blk.pivot_rows.size() < cap) {
    Eigen::Index bi = 0, bj = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = std::abs(residual(i, j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (!(best > std::max(options_.tol, kResidualFloor) * max_abs_)) break;
    blk.pivot_rows.push_back(static_cast<Index>(bi));
    blk.pivot_cols.push_back(static_cast<Index>(bj));
    const Index i = bi / d1, s1 = bi % d1, j = bj / d2, s2 = bj % d2;
    rows_[b].push_back(concat(rows_[b - 1][i], {s1}, {}));
    cols_[b].push_back(concat({}, {s2}, cols_[b + 1][j]));
    const Scalar pivot = residual(bi, bj);
    const Vector col = residual.col(bj);
    const Matrix row = residual.row(bi);
    residual.noalias() -= col * row / pivot;
    ++added;
    if (!options_.greedy) break;
  }
  blk.error = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;
  return added;
}

Index TciState::sweep() {
  const Index n = size();
  Index added = 0;
  for (Index b = 1; b < n; ++b) added += update(b);
  for (Index b = n; b-- > 1;) added += update(b);
  if (added == 0 && options_.global_samples > 0) added += global_search();
  ++sweeps_;
  converged_ = added == 0;
  cached_tt_.reset();
  return added;
}

bool TciState::add_global_pivot(const MultiIndex& x, double min_residual) {
  const Index n = size();
  if (x.size() != n) throw std::invalid_argument("tci: global pivot has wrong length");
  for (Index k = 0; k < n; ++k)
    if (x[k] >= extents_[k]) throw std::out_of_range("tci: global pivot out of range at index " + std::to_string(k));
  auto find = [](const std::vector<MultiIndex>& set, MultiIndex key) -> std::optional<Index> {
    auto it = std::find(set.begin(), set.end(), key);
    if (it == set.end()) return std::nullopt;
    return static_cast<Index>(it - set.begin());
  };
  // Present prefixes form a run from the root; present suffixes a run to the end.
  Index lo = 0;
  while (lo + 1 < n && find(rows_[lo + 1], MultiIndex(x.begin(), x.begin() + lo + 1))) ++lo;
  Index hi = n;
  while (hi > 1 && find(cols_[hi - 1], MultiIndex(x.begin() + hi - 1, x.end()))) --hi;
  if (lo + 1 >= hi) return false;

  const Scalar fx = call(x);
  const double threshold = std::max(options_.tol, kResidualFloor) * max_abs_;
  for (Index b = lo + 1; b < hi; ++b) {
    if (rows_[b].size() >= options_.max_rank) return false;
    const Index r = rows_[b].size();
    Matrix u(1, r), v(r, 1);
    const MultiIndex prefix(x.begin(), x.begin() + b), suffix(x.begin() + b, x.end());
    for (Index a = 0; a < r; ++a) {
      u(0, a) = call(concat(prefix, {}, cols_[b][a]));
      v(a, 0) = call(concat(rows_[b][a], {}, suffix));
    }
    const Scalar schur = fx - (apply_pivot_inverse(pivot_lu(b), u, Side::Right) * v)(0, 0);
    if (!(std::abs(schur) > std::max(threshold, min_residual))) return false;
  }
  for (Index b = lo + 1; b < hi; ++b) {
    rows_[b].push_back(MultiIndex(x.begin(), x.begin() + b));
    cols_[b].push_back(MultiIndex(x.begin() + b, x.end()));
  }
  for (Index b = lo + 1; b < hi; ++b) {
    const Index i = *find(rows_[b - 1], MultiIndex(x.begin(), x.begin() + b - 1));
    const Index j = *find(cols_[b + 1], MultiIndex(x.begin() + b + 1, x.end()));
    blocks_[b].pivot_rows.push_back(x[b - 1] + extents_[b - 1] * i);
    blocks_[b].pivot_cols.push_back(x[b] + extents_[b] * j);
  }
  cached_tt_.reset();
  converged_ = false;
  return true;
}

Index TciState::global_search() {
  const Index n = size();
  if (n < 2) return 0;
  const TensorTrain tt = to_tt();
  std::vector<std::pair<double, MultiIndex>> misses;
  for (Index s = 0; s < options_.global_samples; ++s) {
    MultiIndex x(n);
    for (Index k = 0; k < n; ++k) x[k] = global_rng_.below(extents_[k]);
    misses.emplace_back(std::abs(call(x) - tnkit::evaluate(tt, x)), std::move(x));
  }
  std::sort(misses.begin(), misses.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const double threshold = std::max(options_.tol, kResidualFloor) * max_abs_;
  Index added = 0;
  for (const auto& [err, x] : misses) {
    if (!(err > threshold)) break;
    added += add_global_pivot(x, kGlobalSchurRatio * err) ? 1 : 0;
  }
  return added;
}

std::vector<Index> TciState::ranks() const {
  std::vector<Index> out;
  for (Index b = 1; b < size(); ++b) out.push_back(rows_[b].size());
  return out;
}

double TciState::max_pivot_error() const {
  double e = 0.0;
  for (Index b = 1; b < size(); ++b) e = std::max(e, blocks_[b].error);
  return e;
}

bool TciState::nesting_holds() const {
  const Index n = size();
  for (Index b = 1; b < n; ++b)
    if (rows_[b].size() != cols_[b].size()) return false;
  for (Index b = 1; b <= n; ++b)
    for (const auto& row : rows_[b]) {
      MultiIndex parent(row.begin(), row.end() - 1);
      if (std::find(rows_[b - 1].begin(), rows_[b - 1].end(), parent) == rows_[b - 1].end()) return false;
    }
  for (Index b = 0; b < n; ++b)
    for (const auto& col : cols_[b]) {
      MultiIndex parent(col.begin() + 1, col.end());
      if (std::find(cols_[b + 1].begin(), cols_[b + 1].end(), parent) == cols_[b + 1].end()) return false;
    }
  return true;
}

TensorTrain TciState::to_tt() {
  if (cached_tt_) return *cached_tt_;
  const Index n = size();
  std::vector<DenseTensor> cores;
  if (n == 1) {
    DenseTensor core({1, extents_[0], 1});
    for (Index s = 0; s < extents_[0]; ++s) core({0, s, 0}) = call({s});
    cores.push_back(std::move(core));
  } else {
    if (options_.search == PivotSearch::Full)
      for (Index b = 1; b < n; ++b) refresh(b);
    for (Index k = 0; k + 1 < n; ++k) {
      const Block& blk = blocks_[k + 1];
      const Index ni = rows_[k].size(), d = extents_[k], chi = blk.pivot_cols.size();
      Matrix t(ni * d, chi);
      for (Index i = 0; i < ni; ++i)
        for (Index s = 0; s < d; ++s)
          for (Index a = 0; a < chi; ++a) t(i + ni * s, a) = entry(k + 1, s + d * i, blk.pivot_cols[a]);
      cores.push_back(DenseTensor::from_matrix(apply_pivot_inverse(pivot_lu(k + 1), t, Side::Right), {ni, d, chi}));
    }
    const Block& last = blocks_[n - 1];
    const Index chi = last.pivot_rows.size(), d = extents_[n - 1];
    DenseTensor core({chi, d, 1});
    for (Index a = 0; a < chi; ++a)
      for (Index s = 0; s < d; ++s) core({a, s, 0}) = entry(n - 1, last.pivot_rows[a], s);
    cores.push_back(std::move(core));
  }
  cached_tt_ = TensorTrain(std::move(cores));
  return *cached_tt_;
}

Scalar TciState::evaluate(const MultiIndex& sigma) {
  if (sigma.size() != size()) throw std::invalid_argument("tci evaluate: wrong index length");
  return tnkit::evaluate(to_tt(), sigma);
}

TciState tci_build(TciOracle oracle, std::vector<Index> extents, const TciOptions& options) {
  TciState st(std::move(oracle), std::move(extents), options);
  while (st.size() > 1 && st.sweeps_done() < options.max_sweeps) {
    st.sweep();
    if (st.converged()) break;
  }
  return st;
}

// ------------------------------------------------------------ quadrature

QuadratureRule gauss_kronrod(Index points) {
  auto make = [&](const auto& nodes, const auto& weights) {
    return QuadratureRule{"gk" + std::to_string(points), std::vector<double>(nodes.begin(), nodes.end()),
                          std::vector<double>(weights.begin(), weights.end())};
  };
  switch (points) {
    case 15: return make(kGk15Nodes, kGk15Weights);
    case 21: return make(kGk21Nodes, kGk21Weights);
    case 41: return make(kGk41Nodes, kGk41Weights);
    case 61: return make(kGk61Nodes, kGk61Weights);
    default: throw std::invalid_argument("Gauss-Kronrod rule must have 15, 21, 41 or 61 points");
  }
}

QuadratureRule trapezoidal(Index points) {
  if (points < 2) throw std::invalid_argument("trapezoidal rule needs at least 2 points");
  QuadratureRule q{"trap:" + std::to_string(points), {}, {}};
  const double h = 2.0 / static_cast<double>(points - 1);
  for (Index k = 0; k < points; ++k) {
    q.nodes.push_back(k + 1 == points ? 1.0 : -1.0 + h * static_cast<double>(k));
    q.weights.push_back((k == 0 || k + 1 == points) ? h / 2 : h);
  }
  return q;
}

QuadratureRule quadrature_rule(std::string_view kind) {
  if (kind == "gk15") return gauss_kronrod(15);
  if (kind == "gk21") return gauss_kronrod(21);
  if (kind == "gk41") return gauss_kronrod(41);
  if (kind == "gk61") return gauss_kronrod(61);
  if (kind.starts_with("trap:")) {
    const std::string_view digits = kind.substr(5);
    Index n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size())
      throw std::invalid_argument("bad trapezoidal point count in '" + std::string(kind) + "'");
    return trapezoidal(n);
  }
  throw std::invalid_argument("unknown quadrature rule '" + std::string(kind) + "' (gk15, gk21, gk41, gk61, trap:N)");
}

Scalar weighted_sum(const TensorTrain& tt, const std::vector<std::vector<double>>& weights) {
  if (weights.size() != tt.size()) throw std::invalid_argument("weighted_sum: one weight vector per core required");
  Matrix v = Matrix::Ones(1, 1);
  for (Index k = 0; k < tt.size(); ++k) {
    const DenseTensor& c = tt.core(k);
    if (weights[k].size() != c.dim(1)) throw std::invalid_argument("weighted_sum: weight length mismatch");
    Matrix m = Matrix::Zero(c.dim(0), c.dim(2));
    for (Index s = 0; s < c.dim(1); ++s)
      for (Index a = 0; a < c.dim(0); ++a)
        for (Index b = 0; b < c.dim(2); ++b) m(a, b) += weights[k][s] * c({a, s, b});
    v = v * m;
  }
  return v(0, 0);
}

IntegrationResult integrate(const std::function<Scalar(const std::vector<double>&)>& f, Index dims, double lo,
                            double hi, const QuadratureRule& rule, const TciOptions& options) {
  if (dims == 0) throw std::invalid_argument("integrate: need at least one dimension");
  if (!(hi > lo)) throw std::invalid_argument("integrate: need lo < hi");
  const Index d = rule.size();
  const double half = (hi - lo) / 2;
  std::vector<double> x_of(d), w(d);
  for (Index k = 0; k < d; ++k) {
    x_of[k] = lo + (rule.nodes[k] + 1.0) * half;
    w[k] = rule.weights[k] * half;
  }
  TciOptions opt = options;
  if (!opt.initial) opt.initial = MultiIndex(dims, d / 2);
  TciOracle oracle = [&](const MultiIndex& idx) {
    std::vector<double> x(idx.size());
    for (Index k = 0; k < idx.size(); ++k) x[k] = x_of[idx[k]];
    return f(x);
  };
  TciState st(oracle, std::vector<Index>(dims, d), opt);
  const std::vector<std::vector<double>> weights(dims, w);
  IntegrationResult res;
  do {
    if (dims > 1) st.sweep();
    res.value = weighted_sum(st.to_tt(), weights);
    res.trace.emplace_back(st.oracle_calls(), res.value);
  } while (dims > 1 && !st.converged() && st.sweeps_done() < opt.max_sweeps);
  res.evaluations = st.oracle_calls();
  res.converged = dims == 1 || st.converged();
  for (Index r : st.ranks()) res.max_rank = std::max(res.max_rank, r);
  return res;
}

}  // namespace tnkit
