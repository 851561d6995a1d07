#include "tnkit/quantics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace tnkit {

namespace {

using std::numbers::pi;

// Interpolation error at 24 Chebyshev-Lobatto nodes is below 1e-15.
constexpr Index kQftNodes = 24;

DenseTensor vector_tensor(const std::vector<Scalar>& v, bool as_row) {
  const Index n = v.size();
  return DenseTensor(as_row ? std::vector<Index>{1, n} : std::vector<Index>{n, 1}, v);
}

// Contracts boundary vectors into the outer bonds of an operator chain.
TensorTrainOperator close_chain(std::vector<DenseTensor> cores, const std::vector<Scalar>& left,
                                const std::vector<Scalar>& right) {
  cores.front() = contract(vector_tensor(left, true), cores.front(), {{1, 0}});
  cores.back() = contract(cores.back(), vector_tensor(right, false), {{3, 0}});
  return TensorTrainOperator(std::move(cores));
}

DenseTensor pass_through(Index bond) {
  DenseTensor w({bond, 2, 2, bond});
  for (Index c = 0; c < bond; ++c)
    for (Index s = 0; s < 2; ++s) w({c, s, s, c}) = 1.0;
  return w;
}

bool ascending(const QuanticsGrid& grid, Index dim) {
  return grid.bits < 2 || grid.site_of(dim, 0) < grid.site_of(dim, 1);
}

// Chain of 2-state messages along the bits of `dim`. bit_core(a) has axes
// (incoming message, out bit, in bit, outgoing message). The message enters
// as `start` at the least significant bit when `from_lsb`, otherwise at the
// most significant one, and leaves through `cap`.
TensorTrainOperator message_chain(const QuanticsGrid& grid, Index dim,
                                  const std::function<DenseTensor(Index)>& bit_core,
                                  const std::vector<Scalar>& start, const std::vector<Scalar>& cap,
                                  bool from_lsb) {
  const bool left_to_right = ascending(grid, dim) == from_lsb;
  std::vector<DenseTensor> cores;
  for (Index s = 0; s < grid.sites(); ++s) {
    const auto [d, bit] = grid.site_role(s);
    if (d != dim) {
      cores.push_back(pass_through(2));
    } else if (left_to_right) {
      cores.push_back(bit_core(bit));
    } else {
      cores.push_back(permute(bit_core(bit), {3, 1, 2, 0}));
    }
  }
  auto op = left_to_right ? close_chain(std::move(cores), start, cap) : close_chain(std::move(cores), cap, start);
  return compress(op, TruncationSpec::exact());
}

std::vector<double> binomial_row(Index n) {
  std::vector<double> row(n + 1, 1.0);
  for (Index k = 1; k < n; ++k) row[k] = row[k - 1] * static_cast<double>(n - k + 1) / static_cast<double>(k);
  return row;
}

std::vector<Index> binary_extents(const QuanticsGrid& grid) { return std::vector<Index>(grid.sites(), 2); }

TensorTrain tci_train(const TciOracle& oracle, Index sites, const TciOptions& options, const char* what,
                      Index& calls) {
  std::optional<TciState> built;
  try {
    built.emplace(tci_build(oracle, std::vector<Index>(sites, 2), options));
  } catch (const ZeroTensorError&) {
    return TensorTrain::constant(std::vector<Index>(sites, 2), 0.0);
  }
  TciState& st = *built;
  calls += st.oracle_calls();
  if (!st.converged() && sites > 1) {
    const double rel = st.max_sample() > 0.0 ? st.max_pivot_error() / st.max_sample() : 0.0;
    throw std::runtime_error(std::string(what) + ": cross interpolation did not converge (max rank " +
                             std::to_string(*std::max_element(st.ranks().begin(), st.ranks().end())) +
                             ", relative pivot error " + std::to_string(rel) + ")");
  }
  return st.to_tt();
}

void track(Index& max_bond, const TensorTrain& tt) { max_bond = std::max(max_bond, tt.max_bond()); }

}  // namespace

// ------------------------------------------------------------ grid

QuanticsOrdering parse_ordering(std::string_view name) {
  if (name == "serial") return QuanticsOrdering::Serial;
  if (name == "interleaved") return QuanticsOrdering::Interleaved;
  if (name == "mirror") return QuanticsOrdering::Mirror;
  throw std::invalid_argument("unknown ordering '" + std::string(name) + "' (serial, interleaved, mirror)");
}

std::string_view ordering_name(QuanticsOrdering ordering) {
  switch (ordering) {
    case QuanticsOrdering::Serial: return "serial";
    case QuanticsOrdering::Interleaved: return "interleaved";
    case QuanticsOrdering::Mirror: return "mirror";
  }
  return "";
}

std::vector<Index> encode_bits(std::uint64_t n, Index bits) {
  std::vector<Index> out(bits);
  for (Index a = 0; a < bits; ++a) out[a] = (n >> a) & 1u;
  if (bits < 64 && (n >> bits) != 0) throw std::invalid_argument("encode_bits: value does not fit");
  return out;
}

std::uint64_t decode_bits(std::span<const Index> bits) {
  std::uint64_t n = 0;
  for (Index a = 0; a < bits.size(); ++a) {
    if (bits[a] > 1) throw std::invalid_argument("decode_bits: digit is not binary");
    n |= static_cast<std::uint64_t>(bits[a]) << a;
  }
  return n;
}

QuanticsGrid QuanticsGrid::line(Index bits, double lo, double hi) {
  QuanticsGrid g{bits, 1, {lo}, {hi}, QuanticsOrdering::Serial};
  g.validate();
  return g;
}

QuanticsGrid QuanticsGrid::box(Index bits, Index dims, double lo, double hi, QuanticsOrdering ordering) {
  QuanticsGrid g{bits, dims, std::vector<double>(dims, lo), std::vector<double>(dims, hi), ordering};
  g.validate();
  return g;
}

void QuanticsGrid::validate() const {
  if (bits < 1 || bits > 62) throw std::invalid_argument("quantics grid: bits must be in [1, 62]");
  if (dims < 1) throw std::invalid_argument("quantics grid: at least one dimension");
  if (lo.size() != dims || hi.size() != dims) throw std::invalid_argument("quantics grid: bounds per dimension");
  for (Index d = 0; d < dims; ++d) {
    if (!(hi[d] > lo[d])) throw std::invalid_argument("quantics grid: need hi > lo");
  }
  if (ordering == QuanticsOrdering::Mirror && dims != 2) {
    throw std::invalid_argument("quantics grid: mirror ordering needs exactly two dimensions");
  }
}

double QuanticsGrid::step(Index dim) const { return std::ldexp(hi.at(dim) - lo.at(dim), -static_cast<int>(bits)); }

double QuanticsGrid::coordinate(Index dim, std::uint64_t n) const {
  return lo.at(dim) + (hi.at(dim) - lo.at(dim)) * std::ldexp(static_cast<double>(n), -static_cast<int>(bits));
}

std::pair<Index, Index> QuanticsGrid::site_role(Index site) const {
  switch (ordering) {
    case QuanticsOrdering::Serial: return {site / bits, site % bits};
    case QuanticsOrdering::Interleaved: return {site % dims, site / dims};
    case QuanticsOrdering::Mirror:
      return site < bits ? std::pair<Index, Index>{0, site} : std::pair<Index, Index>{1, 2 * bits - 1 - site};
  }
  return {0, 0};
}

Index QuanticsGrid::site_of(Index dim, Index bit) const {
  switch (ordering) {
    case QuanticsOrdering::Serial: return dim * bits + bit;
    case QuanticsOrdering::Interleaved: return bit * dims + dim;
    case QuanticsOrdering::Mirror: return dim == 0 ? bit : 2 * bits - 1 - bit;
  }
  return 0;
}

std::vector<Index> QuanticsGrid::encode(const std::vector<std::uint64_t>& n) const {
  if (n.size() != dims) throw std::invalid_argument("quantics encode: one integer per dimension");
  std::vector<Index> sigma(sites());
  for (Index d = 0; d < dims; ++d) {
    if (n[d] >= points()) throw std::invalid_argument("quantics encode: index outside the grid");
    for (Index a = 0; a < bits; ++a) sigma[site_of(d, a)] = (n[d] >> a) & 1u;
  }
  return sigma;
}

std::vector<std::uint64_t> QuanticsGrid::decode(std::span<const Index> sigma) const {
  if (sigma.size() != sites()) throw std::invalid_argument("quantics decode: wrong number of sites");
  std::vector<std::uint64_t> n(dims, 0);
  for (Index s = 0; s < sigma.size(); ++s) {
    const auto [d, a] = site_role(s);
    n[d] |= static_cast<std::uint64_t>(sigma[s] & 1u) << a;
  }
  return n;
}

std::vector<double> QuanticsGrid::point(std::span<const Index> sigma) const {
  const auto n = decode(sigma);
  std::vector<double> x(dims);
  for (Index d = 0; d < dims; ++d) x[d] = coordinate(d, n[d]);
  return x;
}

// ------------------------------------------------------------ functions

TensorTrain exp_mps(const QuanticsGrid& grid, Scalar a, Index dim) {
  grid.validate();
  std::vector<Vector> local;
  for (Index s = 0; s < grid.sites(); ++s) {
    const auto [d, bit] = grid.site_role(s);
    Vector v = Vector::Ones(2);
    if (d == dim) v(1) = std::exp(a * std::ldexp(grid.step(dim), static_cast<int>(bit)));
    local.push_back(v);
  }
  local.front() *= std::exp(a * grid.lo.at(dim));
  return TensorTrain::product_state(local);
}

TensorTrain cos_mps(const QuanticsGrid& grid, double k, Index dim) {
  return scaled(add(exp_mps(grid, Scalar(0.0, k), dim), exp_mps(grid, Scalar(0.0, -k), dim)), 0.5);
}

TensorTrain poly_mps(const QuanticsGrid& grid, const std::vector<Scalar>& coeffs, Index dim) {
  grid.validate();
  if (coeffs.empty()) throw std::invalid_argument("poly_mps: no coefficients");
  const Index q = coeffs.size() - 1;
  const double lo = grid.lo.at(dim), len = grid.hi.at(dim) - grid.lo.at(dim);

  // Coefficients in u = (x - lo) / len.
  std::vector<Scalar> b(q + 1, 0.0);
  for (Index p = 0; p <= q; ++p) {
    const auto binom = binomial_row(p);
    for (Index j = 0; j <= p; ++j) {
      b[j] += coeffs[p] * binom[j] * std::pow(lo, static_cast<double>(p - j)) * std::pow(len, static_cast<double>(j));
    }
  }

  std::vector<std::vector<double>> binom(q + 1);
  for (Index j = 0; j <= q; ++j) binom[j] = binomial_row(j);

  std::vector<DenseTensor> cores;
  for (Index s = 0; s < grid.sites(); ++s) {
    const auto [d, bit] = grid.site_role(s);
    DenseTensor c({q + 1, 2, q + 1});
    const double u = std::ldexp(1.0, static_cast<int>(bit) - static_cast<int>(grid.bits));
    for (Index i = 0; i <= q; ++i) {
      c({i, 0, i}) = 1.0;
      if (d != dim) {
        c({i, 1, i}) = 1.0;
        continue;
      }
      for (Index j = i; j <= q; ++j) c({i, 1, j}) = binom[j][i] * std::pow(u, static_cast<double>(j - i));
    }
    cores.push_back(std::move(c));
  }
  std::vector<Scalar> first(q + 1, 0.0);
  first[0] = 1.0;
  cores.front() = contract(vector_tensor(first, true), cores.front(), {{1, 0}});
  cores.back() = contract(cores.back(), vector_tensor(b, false), {{2, 0}});
  return TensorTrain(std::move(cores));
}

QuanticsFit quantics_tci(const GridFunction& f, const QuanticsGrid& grid, const TciOptions& options) {
  grid.validate();
  auto oracle = [&](const MultiIndex& sigma) { return f(grid.point(sigma)); };
  QuanticsFit fit;
  std::optional<TciState> built;
  try {
    built.emplace(tci_build(oracle, binary_extents(grid), options));
  } catch (const ZeroTensorError&) {
    fit.train = TensorTrain::constant(binary_extents(grid), 0.0);
    fit.max_rank = 1;
    fit.converged = true;
    return fit;
  }
  TciState& st = *built;
  fit.train = st.to_tt();
  fit.oracle_calls = st.oracle_calls();
  fit.max_rank = fit.train.max_bond();
  fit.pivot_error = st.max_sample() > 0.0 ? st.max_pivot_error() / st.max_sample() : 0.0;
  fit.converged = st.converged() || grid.sites() == 1;
  return fit;
}

// ------------------------------------------------------------ operators

TensorTrainOperator adder_mpo(const QuanticsGrid& grid, bool modulo) {
  grid.validate();
  if (grid.dims != 2 || grid.ordering != QuanticsOrdering::Interleaved) {
    throw std::invalid_argument("adder_mpo: needs a 2-D interleaved grid");
  }
  // (carry in, x, y, x', y', carry out) with x = x', y = x' + y' + c mod 2.
  DenseTensor magic({2, 2, 2, 2, 2, 2});
  for (Index c = 0; c < 2; ++c)
    for (Index xp = 0; xp < 2; ++xp)
      for (Index yp = 0; yp < 2; ++yp) {
        const Index sum = xp + yp + c;
        magic({c, xp, sum & 1u, xp, yp, sum >> 1}) = 1.0;
      }
  const DenseTensor paired = permute(magic, {0, 1, 3, 2, 4, 5});
  const Factorization split = svd_truncate(paired, 3, TruncationSpec::exact());

  std::vector<DenseTensor> cores;
  for (Index a = 0; a < grid.bits; ++a) {
    cores.push_back(split.left);
    cores.push_back(split.right);
  }
  const std::vector<Scalar> cap = modulo ? std::vector<Scalar>{1.0, 1.0} : std::vector<Scalar>{1.0, 0.0};
  return compress(close_chain(std::move(cores), {1.0, 0.0}, cap), TruncationSpec::exact());
}

TensorTrainOperator shift_mpo(const QuanticsGrid& grid, std::int64_t shift, bool modulo, Index dim) {
  grid.validate();
  if (dim >= grid.dims) throw std::invalid_argument("shift_mpo: dimension out of range");
  const std::uint64_t size = grid.points();
  const std::uint64_t magnitude = shift < 0 ? static_cast<std::uint64_t>(-(shift + 1)) + 1 : shift;
  std::uint64_t amount = magnitude;
  bool transpose = shift < 0;
  if (modulo) {
    amount = magnitude % size;
    if (transpose) amount = (size - amount) % size;
    transpose = false;
  } else if (magnitude >= size) {
    throw std::invalid_argument("shift_mpo: open shift of at least the grid size");
  }

  // T(s)_{m,m'} = delta_{m', m+s}; rows are the output bit m_a.
  auto bit_core = [&](Index bit) {
    const Index sa = (amount >> bit) & 1u;
    DenseTensor w({2, 2, 2, 2});
    for (Index c = 0; c < 2; ++c)
      for (Index m = 0; m < 2; ++m) {
        const Index sum = m + sa + c;
        if (transpose) {
          w({c, sum & 1u, m, sum >> 1}) = 1.0;
        } else {
          w({c, m, sum & 1u, sum >> 1}) = 1.0;
        }
      }
    return w;
  };
  const std::vector<Scalar> cap = modulo ? std::vector<Scalar>{1.0, 1.0} : std::vector<Scalar>{1.0, 0.0};
  return message_chain(grid, dim, bit_core, {1.0, 0.0}, cap, true);
}

TensorTrainOperator laplacian_mpo(const QuanticsGrid& grid, Boundary boundary) {
  grid.validate();
  const bool periodic = boundary == Boundary::Periodic;
  const auto id = TensorTrainOperator::identity(binary_extents(grid));
  std::optional<TensorTrainOperator> total;
  for (Index d = 0; d < grid.dims; ++d) {
    const double inv_h2 = 1.0 / (grid.step(d) * grid.step(d));
    auto term = add(add(shift_mpo(grid, 1, periodic, d), shift_mpo(grid, -1, periodic, d)), scaled(id, -2.0));
    term = scaled(term, inv_h2);
    total = total ? compress(add(*total, term), TruncationSpec::exact()) : compress(term, TruncationSpec::exact());
  }
  return *total;
}

TensorTrainOperator integral_mpo(const QuanticsGrid& grid, bool inclusive, Index dim) {
  grid.validate();
  if (dim >= grid.dims) throw std::invalid_argument("integral_mpo: dimension out of range");
  // Message 0: comparison undecided, 1: n > m already decided.
  auto bit_core = [](Index) {
    DenseTensor w({2, 2, 2, 2});
    for (Index x = 0; x < 2; ++x)
      for (Index y = 0; y < 2; ++y) {
        w({1, x, y, 1}) = 1.0;
        if (x == y) w({0, x, y, 0}) = 1.0;
        if (x == 1 && y == 0) w({0, x, y, 1}) = 1.0;
      }
    return w;
  };
  const std::vector<Scalar> cap{inclusive ? 1.0 : 0.0, 1.0};
  return message_chain(grid, dim, bit_core, {1.0, 0.0}, cap, false);
}

TensorTrainOperator qft_mpo(Index bits, Index chi) {
  if (bits < 1) throw std::invalid_argument("qft_mpo: at least one bit");
  if (chi < 2) throw std::invalid_argument("qft_mpo: chi must be at least 2");
  const Index nodes = std::max<Index>(chi, kQftNodes);
  std::vector<double> c(nodes);
  for (Index a = 0; a < nodes; ++a) c[a] = 0.5 * (1.0 - std::cos(pi * static_cast<double>(a) / (nodes - 1)));
  auto lagrange = [&](Index beta, double x) {
    double p = 1.0;
    for (Index g = 0; g < nodes; ++g) {
      if (g != beta) p *= (x - c[g]) / (c[beta] - c[g]);
    }
    return p;
  };

  // core[beta, w, t, alpha] = exp(-i pi (t w + c_alpha t)) P_beta((c_alpha + w) / 2) / sqrt(2)
  DenseTensor bulk({nodes, 2, 2, nodes});
  const double norm = 1.0 / std::numbers::sqrt2;
  for (Index alpha = 0; alpha < nodes; ++alpha)
    for (Index w = 0; w < 2; ++w)
      for (Index t = 0; t < 2; ++t) {
        const Scalar phase = std::polar(norm, -pi * (static_cast<double>(t * w) + c[alpha] * t));
        for (Index beta = 0; beta < nodes; ++beta) {
          bulk({beta, w, t, alpha}) = phase * lagrange(beta, 0.5 * (c[alpha] + w));
        }
      }
  std::vector<Scalar> ones(nodes, 1.0), first(nodes, 0.0);
  first[0] = 1.0;
  return compress(close_chain(std::vector<DenseTensor>(bits, bulk), ones, first), TruncationSpec::rank(chi));
}

TensorTrain bit_reverse(const TensorTrain& tt) {
  std::vector<DenseTensor> cores;
  for (Index k = tt.size(); k-- > 0;) cores.push_back(permute(tt.core(k), {2, 1, 0}));
  std::optional<Index> center;
  if (tt.center()) center = tt.size() - 1 - *tt.center();
  return TensorTrain(std::move(cores), center);
}

double signed_wavenumber(std::uint64_t omega, Index bits, double length) {
  const double w = static_cast<double>(omega);
  const std::uint64_t half = std::uint64_t{1} << (bits - 1);
  const double signed_w = omega > half ? w - std::ldexp(1.0, static_cast<int>(bits)) : w;
  return 2.0 * pi * signed_w / length;
}

// ------------------------------------------------------------ pipelines

HeatResult heat_solve(const GridFunction& u0, double t, const QuanticsGrid& grid, const HeatOptions& options) {
  grid.validate();
  if (grid.dims != 1) throw std::invalid_argument("heat_solve: one-dimensional grids only");
  if (!(t >= 0.0)) throw std::invalid_argument("heat_solve: time must be non-negative");
  const Index n = grid.bits;
  HeatResult result;

  TciOptions tci = options.tci;
  if (!tci.initial) {
    // Start from the largest of a coarse scan so a localized feature is seen.
    const Index probe_bits = std::min<Index>(n, 10);
    double best = -1.0;
    std::uint64_t arg = 0;
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << probe_bits); ++p) {
      const std::uint64_t idx = p << (n - probe_bits);
      const double v = std::abs(u0({grid.coordinate(0, idx)}));
      if (v > best) best = v, arg = idx;
    }
    tci.initial = grid.encode({arg});
  }
  result.initial = tci_train([&](const MultiIndex& s) { return u0(grid.point(s)); }, n, tci, "heat: initial condition",
                             result.oracle_calls);
  track(result.max_bond, result.initial);
  if (t == 0.0) {
    result.solution = result.initial;
    return result;
  }

  const auto qft = qft_mpo(n, options.qft_chi);
  auto spectrum = apply_zipup(qft, result.initial, options.spec).train;
  track(result.max_bond, spectrum);

  // exp(-k^2 t) peaks at w = 0 and at w = 2^N - 1, which share no bits, so
  // the halves k >= 0 and k < 0 are interpolated separately from their own
  // peaks. Site k carries the bit of weight 2^{N-1-k}.
  const double length = grid.hi[0] - grid.lo[0];
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  auto kernel_half = [&](bool negative) {
    TciOptions half_options = options.tci;
    half_options.initial = MultiIndex(n, negative ? 1 : 0);
    return tci_train(
        [&, negative](const MultiIndex& s) {
          std::uint64_t w = 0;
          for (Index k = 0; k < n; ++k) w |= static_cast<std::uint64_t>(s[k]) << (n - 1 - k);
          if ((w > half) != negative) return Scalar(0.0);
          const double kw = signed_wavenumber(w, n, length);
          return Scalar(std::exp(-kw * kw * t));
        },
        n, half_options, "heat: kernel", result.oracle_calls);
  };
  TensorTrain kernel = kernel_half(false);
  if (n > 1) kernel = compress(add(kernel, kernel_half(true)), options.spec).train;
  track(result.max_bond, kernel);

  spectrum = apply_zipup(diagonal_operator(kernel), spectrum, options.spec).train;
  track(result.max_bond, spectrum);
  result.solution = compress(apply_zipup(adjoint(qft), spectrum, options.spec).train, options.spec).train;
  track(result.max_bond, result.solution);
  return result;
}

TensorTrainOperator helmholtz_assemble(const TensorTrain& rho, const QuanticsGrid& grid, Boundary boundary) {
  if (rho.size() != grid.sites()) throw std::invalid_argument("helmholtz_assemble: rho does not match the grid");
  return compress(add(laplacian_mpo(grid, boundary), scaled(diagonal_operator(rho), -1.0)), TruncationSpec::exact());
}

TensorTrainOperator helmholtz_assemble(const GridFunction& rho, const QuanticsGrid& grid, Boundary boundary,
                                       const TciOptions& tci) {
  return helmholtz_assemble(quantics_tci(rho, grid, tci).train, grid, boundary);
}

PoissonResult poisson_solve(const GridFunction& source, const GridFunction& rho, const QuanticsGrid& grid,
                            const PoissonOptions& options) {
  grid.validate();
  const auto helmholtz = helmholtz_assemble(rho, grid, options.boundary, options.tci);
  const TensorTrain n = quantics_tci(source, grid, options.tci).train;
  PoissonResult result;
  if (norm(n) == 0.0) {
    result.solution = TensorTrain::constant(binary_extents(grid), 0.0);
    return result;
  }
  const auto positive = scaled(helmholtz, -1.0);
  const TensorTrain rhs = scaled(n, -1.0);

  AlsOptions als = options.als;
  als.normal_equations = false;
  auto solved = als_linear_solve(positive, rhs, rhs, als);
  result.residual = relative_residual(helmholtz, solved.solution, n);
  if (result.residual > options.residual_target) {
    als.normal_equations = true;
    auto retry = als_linear_solve(positive, rhs, solved.solution, als);
    const double r = relative_residual(helmholtz, retry.solution, n);
    if (r < result.residual) {
      solved = std::move(retry);
      result.residual = r;
      result.normal_equations = true;
    }
  }
  result.solution = compress(solved.solution, TruncationSpec::tolerance(options.output_tol)).train;
  result.residual = relative_residual(helmholtz, result.solution, n);
  result.report = std::move(solved.report);
  return result;
}

SchrodingerResult schrodinger_ground_state(const GridFunction& potential, const QuanticsGrid& grid,
                                           Boundary boundary, const DmrgOptions& dmrg, const TciOptions& tci) {
  grid.validate();
  const auto v = quantics_tci(potential, grid, tci).train;
  const auto h = compress(add(scaled(laplacian_mpo(grid, boundary), -1.0), diagonal_operator(v)),
                          TruncationSpec::exact());
  RandomSource rng(0x5c4);
  const auto guess = TensorTrain::random(binary_extents(grid), 4, rng);
  auto res = dmrg_min_eig(h, guess, dmrg);
  return {res.energy, std::move(res.state), res.converged};
}

}  // namespace tnkit
