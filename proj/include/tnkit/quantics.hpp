#pragma once

#include "tnkit/solvers.hpp"
#include "tnkit/tci.hpp"
#include "tnkit/tensor_train.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace tnkit {

enum class QuanticsOrdering {
  Serial,       // all bits of dimension 0, then dimension 1, ...
  Interleaved,  // bit a of every dimension before bit a+1
  Mirror,       // 2-D only: dimension 0 from least to most significant, then dimension 1 reversed
};

QuanticsOrdering parse_ordering(std::string_view name);
std::string_view ordering_name(QuanticsOrdering ordering);

// Bits of n from least to most significant, padded to `bits`.
std::vector<Index> encode_bits(std::uint64_t n, Index bits);
std::uint64_t decode_bits(std::span<const Index> bits);

// 2^bits equispaced points per dimension on [lo, hi), x_n = lo + (hi - lo) n / 2^bits.
struct QuanticsGrid {
  Index bits = 8;
  Index dims = 1;
  std::vector<double> lo{0.0};
  std::vector<double> hi{1.0};
  QuanticsOrdering ordering = QuanticsOrdering::Serial;

  static QuanticsGrid line(Index bits, double lo, double hi);
  static QuanticsGrid box(Index bits, Index dims, double lo, double hi,
                          QuanticsOrdering ordering = QuanticsOrdering::Interleaved);

  void validate() const;
  Index sites() const { return bits * dims; }
  std::uint64_t points() const { return std::uint64_t{1} << bits; }
  double step(Index dim) const;
  double coordinate(Index dim, std::uint64_t n) const;

  // (dimension, bit) carried by a site; bit 0 is the least significant.
  std::pair<Index, Index> site_role(Index site) const;
  Index site_of(Index dim, Index bit) const;
  std::vector<Index> encode(const std::vector<std::uint64_t>& n) const;
  std::vector<std::uint64_t> decode(std::span<const Index> sigma) const;
  std::vector<double> point(std::span<const Index> sigma) const;
};

using GridFunction = std::function<Scalar(const std::vector<double>&)>;

// Functions of coordinate `dim` alone; the other sites carry constant legs.
TensorTrain exp_mps(const QuanticsGrid& grid, Scalar a, Index dim = 0);  // all bonds 1
TensorTrain cos_mps(const QuanticsGrid& grid, double k, Index dim = 0);  // bond 2
// sum_q coeffs[q] x^q with bonds Q + 1, built from binomial transfer matrices
// in the rescaled variable (x - lo) / (hi - lo).
TensorTrain poly_mps(const QuanticsGrid& grid, const std::vector<Scalar>& coeffs, Index dim = 0);

struct QuanticsFit {
  TensorTrain train;
  Index oracle_calls = 0;
  Index max_rank = 0;
  double pivot_error = 0.0;  // relative to the largest sample
  bool converged = false;
};

// Cross interpolation settings used by the quantics routines: tol 1e-12,
// 40 sweeps and a 64-point global search, which catches functions whose
// neighbouring-site slices look separable (sums of coordinates on
// interleaved grids).
inline TciOptions quantics_tci_options(Index max_rank = 64) {
  TciOptions o;
  o.tol = 1e-12;
  o.max_rank = max_rank;
  o.max_sweeps = 40;
  o.global_samples = 64;
  return o;
}

QuanticsFit quantics_tci(const GridFunction& f, const QuanticsGrid& grid,
                         const TciOptions& options = quantics_tci_options());

// Theta_{nm,n'm'} = delta_{n,n'} delta_{m,n'+m'} on a 2-D interleaved grid.
// Without `modulo`, sums that overflow 2^bits give zero rows.
TensorTrainOperator adder_mpo(const QuanticsGrid& grid, bool modulo);
// [T(s) psi]_m = psi_{m+s} along `dim`. Without `modulo`, psi is zero
// outside the grid.
TensorTrainOperator shift_mpo(const QuanticsGrid& grid, std::int64_t shift, bool modulo, Index dim = 0);

enum class Boundary { Open, Periodic };

// Sum over dimensions of (T(1) + T(-1) - 2) / h^2. Open boundaries treat
// points outside the grid as zero, so the first and last rows are one-sided.
TensorTrainOperator laplacian_mpo(const QuanticsGrid& grid, Boundary boundary = Boundary::Periodic);
// F_n = sum_{m<n} psi_m, plus psi_n when `inclusive`; bond 2.
TensorTrainOperator integral_mpo(const QuanticsGrid& grid, bool inclusive = true, Index dim = 0);

// Discrete Fourier transform 2^{-N/2} exp(-2 pi i w t / 2^N) on N bits.
// Built from Chebyshev-Lobatto interpolation on max(chi, 24) nodes and
// SVD-truncated to bonds of at most chi. Input bits are in standard order;
// output site k carries the frequency bit of weight 2^{N-1-k}.
TensorTrainOperator qft_mpo(Index bits, Index chi = 15);

// Reverses the site order.
TensorTrain bit_reverse(const TensorTrain& tt);

// k = 2 pi w / L for w <= 2^{N-1}, else 2 pi (w - 2^N) / L.
double signed_wavenumber(std::uint64_t omega, Index bits, double length);

struct HeatOptions {
  TruncationSpec spec = TruncationSpec::both(128, 1e-22);
  TciOptions tci = quantics_tci_options(128);
  Index qft_chi = 15;
};

struct HeatResult {
  TensorTrain solution;
  TensorTrain initial;
  Index max_bond = 0;  // largest bond over the pipeline
  Index oracle_calls = 0;
};

// Periodic heat equation u_t = u_xx on a 1-D grid via QFT, kernel exp(-k^2 t)
// and the adjoint QFT. Throws if cross interpolation of u0 or the kernel does
// not converge.
HeatResult heat_solve(const GridFunction& u0, double t, const QuanticsGrid& grid, const HeatOptions& options = {});

// Laplacian minus diag(rho).
TensorTrainOperator helmholtz_assemble(const TensorTrain& rho, const QuanticsGrid& grid,
                                       Boundary boundary = Boundary::Open);
TensorTrainOperator helmholtz_assemble(const GridFunction& rho, const QuanticsGrid& grid,
                                       Boundary boundary = Boundary::Open,
                                       const TciOptions& tci = quantics_tci_options());

struct PoissonOptions {
  Boundary boundary = Boundary::Open;
  TciOptions tci = quantics_tci_options();
  AlsOptions als = {.sweeps = 12, .max_rank = 64, .svd_tol = 1e-30, .residual_tol = 1e-10};
  double residual_target = 1e-8;  // above this the normal equations are tried
  // Relative discarded weight when compressing the returned solution; the
  // sweeps themselves keep every singular value above svd_tol.
  double output_tol = 1e-24;
};

struct PoissonResult {
  TensorTrain solution;
  double residual = 0.0;  // ||(Lap - rho) U - n|| / ||n|| for the returned U
  bool normal_equations = false;
  SweepReport report;
};

// Solves Lap U - rho U = n as the positive system (rho - Lap) U = -n.
PoissonResult poisson_solve(const GridFunction& source, const GridFunction& rho, const QuanticsGrid& grid,
                            const PoissonOptions& options = {});

struct SchrodingerResult {
  double energy = 0.0;
  TensorTrain state;
  bool converged = false;
};

// Lowest eigenpair of -Lap + diag(U).
SchrodingerResult schrodinger_ground_state(const GridFunction& potential, const QuanticsGrid& grid,
                                           Boundary boundary = Boundary::Open, const DmrgOptions& dmrg = {},
                                           const TciOptions& tci = quantics_tci_options());

}  // namespace tnkit
