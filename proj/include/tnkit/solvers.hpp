#pragma once

#include "tnkit/circuit.hpp"
#include "tnkit/tensor_train.hpp"

#include <functional>
#include <vector>

namespace tnkit {

// Open chain with H = J sum Z_i Z_{i+1} - h_z sum Z_i - h_x sum X_i.
struct TfiModel {
  Index spins = 2;
  double j = 1.0;
  double hz = 0.0;
  double hx = 1.0;
  void validate() const;
};

// Bond extent 3 in the interior.
TensorTrainOperator tfi_mpo(const TfiModel& m);

struct SweepReport {
  std::vector<double> values;  // energy or relative residual after each sweep
  std::vector<Index> max_bonds;
  std::vector<double> seconds;  // wall time of each sweep
  Index local_solver_warnings = 0;
};

// Lowest eigenpair of a Hermitian operator given only its action. Uses
// restarted Lanczos with full reorthogonalization, starting from `start`.
struct EigenPair {
  double value = 0.0;
  Vector vector;
  bool converged = false;
};
EigenPair lowest_eigenpair(const std::function<Vector(const Vector&)>& apply, const Vector& start,
                           double tol = 1e-12, Index krylov = 48, Index restarts = 40);

enum class SweepMode { OneSite, TwoSite };

struct DmrgOptions {
  SweepMode mode = SweepMode::TwoSite;
  // Bond cap per sweep; the last entry is reused once the list runs out.
  std::vector<Index> chi_schedule = {32};
  Index max_sweeps = 20;
  double energy_tol = 1e-10;
  double svd_tol = 1e-14;
  Index dense_limit = 512;  // local problems below this size are solved densely
};

struct DmrgResult {
  double energy = 0.0;
  TensorTrain state;
  SweepReport report;
  bool converged = false;
};

DmrgResult dmrg_min_eig(const TensorTrainOperator& op, const TensorTrain& guess, const DmrgOptions& options = {});

struct AlsOptions {
  Index sweeps = 4;
  Index max_rank = 64;
  double svd_tol = 1e-14;
  // Solve A^dagger A x = A^dagger b instead; for operators that are not
  // positive definite.
  bool normal_equations = false;
  Index dense_limit = 2048;  // larger local systems use conjugate gradients
  double residual_tol = 0.0;  // stop early once the relative residual is below
};

struct AlsResult {
  TensorTrain solution;
  SweepReport report;  // values are ||Ax - b|| / ||b||
};

AlsResult als_linear_solve(const TensorTrainOperator& a, const TensorTrain& b, const TensorTrain& guess,
                           const AlsOptions& options = {});

// ||Ax - b|| / ||b|| evaluated on the exact difference train.
double relative_residual(const TensorTrainOperator& a, const TensorTrain& x, const TensorTrain& b);

// One Trotter step of exp(-i H eta), or exp(-H eta) when `imaginary` is set,
// as a gate list. Order 1 is U_X followed by U_ZZ U_Z; order 2 splits U_X
// symmetrically around the diagonal part.
QuantumCircuit trotter_layers(const TfiModel& m, double eta, bool imaginary, int order = 2);

struct ImaginaryTebdOptions {
  double eta = 0.1;
  double tau_max = 10.0;
  TruncationSpec spec = TruncationSpec::rank(40);
  int order = 2;
  Index measure_every = 10;
};

struct ImaginaryTebdResult {
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<Index> max_bonds;
  TensorTrain state;
  double energy = 0.0;
};

// Starts from |+>^N and renormalizes after every gate.
ImaginaryTebdResult imaginary_tebd_ground_state(const TfiModel& m, const ImaginaryTebdOptions& options = {});

}  // namespace tnkit
