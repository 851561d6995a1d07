#pragma once

#include "tnkit/random.hpp"
#include "tnkit/tensor.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace tnkit {

enum class GateKind { X, Y, Z, H, T, RX, RY, RZ, U, Matrix1, CNOT, SWAP, Matrix2 };

// A one- or two-qubit gate. Two-qubit matrices use the basis
// |q_first q_second> with row index 2 * first + second.
struct Gate {
  GateKind kind = GateKind::Matrix1;
  std::vector<Index> sites;
  std::vector<double> params;
  Matrix matrix;
  bool unitary = true;

  Index arity() const { return sites.size(); }
  std::string name() const;
  Gate dagger() const;

  static Gate x(Index q);
  static Gate y(Index q);
  static Gate z(Index q);
  static Gate h(Index q);
  static Gate t(Index q);  // diag(e^{i pi/8}, e^{-i pi/8})
  static Gate rx(Index q, double angle);
  static Gate ry(Index q, double angle);
  static Gate rz(Index q, double angle);
  // RZ(phi) RY(theta) RZ(lambda)
  static Gate u(Index q, double theta, double phi, double lambda);
  static Gate cnot(Index control, Index target);
  static Gate swap(Index a, Index b);
  // Arbitrary matrices; unitarity is checked to 1e-12 unless disabled.
  static Gate single(const Matrix& m, Index q, bool check_unitary = true);
  static Gate two(const Matrix& m, Index first, Index second, bool check_unitary = true);
};

class QuantumCircuit {
 public:
  explicit QuantumCircuit(Index qubits = 0) : qubits_(qubits) {}

  Index qubits() const { return qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  Index size() const { return gates_.size(); }
  QuantumCircuit& add(Gate g);

  // Earliest layer of each gate when gates are packed as soon as their
  // qubits are free.
  std::vector<Index> layers() const;
  Index depth() const;
  QuantumCircuit slice(Index begin, Index end) const;
  QuantumCircuit inverse() const;
  std::string to_text() const;

 private:
  Index qubits_;
  std::vector<Gate> gates_;
};

// Text format: first line `qubits N`, then one gate per line as
// `NAME q0 [q1] [angles...]` with 0-indexed qubits and angles in radians.
// `#` starts a comment. Names: X Y Z H T RX RY RZ U CNOT (or CX) SWAP.
QuantumCircuit parse_circuit(std::string_view text);
QuantumCircuit load_circuit(const std::string& path);

// Per layer: a Haar-random single-qubit rotation on every qubit, then CNOTs
// on neighbouring pairs starting at qubit 0 on even layers and 1 on odd ones.
QuantumCircuit random_circuit(Index qubits, Index depth, RandomSource& rng);
// H on qubit 0 followed by a CNOT chain.
QuantumCircuit ghz_circuit(Index qubits);

// Gate matrix as a tensor (out_lo, out_hi, in_lo, in_hi) for its two sites in
// increasing order.
DenseTensor two_site_tensor(const Gate& g);

}  // namespace tnkit
