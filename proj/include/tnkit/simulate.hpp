#pragma once

#include "tnkit/circuit.hpp"
#include "tnkit/tensor_train.hpp"

#include <optional>
#include <vector>

namespace tnkit {

// Largest register the explicit backends accept.
inline constexpr Index kMaxStatevectorQubits = 24;
inline constexpr Index kMaxDenseMatrixQubits = 12;

// State vectors index qubit q by bit q of the flat index.
Vector run_statevector(const QuantumCircuit& c);
void apply_gate(Vector& psi, const Gate& g, Index qubits);
// Multiplies full 2^N x 2^N gate matrices; reference backend only.
Vector run_dense_matrix(const QuantumCircuit& c);
Matrix circuit_unitary(const QuantumCircuit& c);

enum class LongRangeRoute { Mpo, SwapNetwork };

struct GateApplyOptions {
  TruncationSpec spec = TruncationSpec::exact();
  LongRangeRoute route = LongRangeRoute::Mpo;
  bool renormalize = true;
};

// Applies one gate in place and returns the kept fraction of the squared
// norm (1 when nothing was truncated).
double apply_gate(TensorTrain& psi, const Gate& g, const GateApplyOptions& options);

struct TebdResult {
  TensorTrain state;
  double fidelity = 1.0;  // product of per-gate kept fractions
  std::vector<double> gate_fidelities;
  Index max_bond = 1;
};

TensorTrain zero_state(Index qubits);
TebdResult run_tebd(const QuantumCircuit& c, const TruncationSpec& spec,
                    LongRangeRoute route = LongRangeRoute::Mpo,
                    const std::optional<TensorTrain>& initial = std::nullopt);
TensorTrain run_mps_exact(const QuantumCircuit& c, LongRangeRoute route = LongRangeRoute::Mpo);

TensorTrainOperator gate_to_mpo(const Gate& g, Index qubits);
TensorTrainOperator circuit_to_mpo(const QuantumCircuit& c, const TruncationSpec& spec = TruncationSpec::exact());

struct CnotFactors {
  DenseTensor control;  // (out, in, bond): projectors |0><0| and |1><1|
  DenseTensor target;   // (bond, out, in): identity and X
};
CnotFactors cnot_factorized();

// Variational fit of a circuit slice applied to `start`. Without a guess the
// truncated TEBD result of the slice is used.
FitResult fit_circuit(const QuantumCircuit& slice, const TensorTrain& start, Index chi, FitMode mode,
                      Index sweeps, const std::optional<TensorTrain>& guess = std::nullopt);

struct FittedRun {
  TensorTrain state;
  double fidelity = 1.0;  // product of per-slice fidelities
  std::vector<double> slice_fidelities;
};
// Splits the circuit into slices of `slice_depth` layers and fits each one.
FittedRun run_fitted(const QuantumCircuit& c, Index chi, Index slice_depth, FitMode mode, Index sweeps);

// <bits|C|0...0> by evolving |0...0> through the first half of the layers
// and <bits| backwards through the daggered second half.
Scalar amplitude(const QuantumCircuit& c, const std::vector<Index>& bits,
                 const TruncationSpec& spec = TruncationSpec::exact());

// Gate-by-gate sampling: after each gate the touched bits are redrawn from
// the amplitudes of the partial circuit with all other bits fixed.
class AmplitudeSampler {
 public:
  explicit AmplitudeSampler(const QuantumCircuit& c);
  std::vector<Index> sample(RandomSource& rng) const;

 private:
  QuantumCircuit circuit_;
  std::vector<TensorTrain> prefix_states_;  // state after the first k gates
};

std::vector<Index> sample_by_amplitudes(const QuantumCircuit& c, RandomSource& rng);

}  // namespace tnkit
