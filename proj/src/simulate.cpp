#include "tnkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnkit {

// ------------------------------------------------------------ explicit backends

void apply_gate(Vector& psi, const Gate& g, Index qubits) {
  const Index dim = Index{1} << qubits;
  if (static_cast<Index>(psi.size()) != dim) throw std::invalid_argument("apply_gate: state size mismatch");
  if (g.arity() == 1) {
    const Index mask = Index{1} << g.sites[0];
    const Matrix& u = g.matrix;
    for (Index i = 0; i < dim; ++i) {
      if (i & mask) continue;
      const Scalar a0 = psi(i), a1 = psi(i | mask);
      psi(i) = u(0, 0) * a0 + u(0, 1) * a1;
      psi(i | mask) = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return;
  }
  const Index mf = Index{1} << g.sites[0], ms = Index{1} << g.sites[1];
  const Matrix& u = g.matrix;
  for (Index i = 0; i < dim; ++i) {
    if ((i & mf) || (i & ms)) continue;
    const Index idx[4] = {i, i | ms, i | mf, i | mf | ms};  // row 2*first + second
    Scalar in[4], out[4];
    for (int k = 0; k < 4; ++k) in[k] = psi(idx[k]);
    for (int r = 0; r < 4; ++r) {
      out[r] = 0;
      for (int k = 0; k < 4; ++k) out[r] += u(r, k) * in[k];
    }
    for (int k = 0; k < 4; ++k) psi(idx[k]) = out[k];
  }
}

Vector run_statevector(const QuantumCircuit& c) {
  if (c.qubits() > kMaxStatevectorQubits) {
    throw std::invalid_argument("statevector backend supports at most " + std::to_string(kMaxStatevectorQubits) +
                                " qubits");
  }
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(Index{1} << c.qubits()));
  psi(0) = 1;
  for (const auto& g : c.gates()) apply_gate(psi, g, c.qubits());
  return psi;
}

namespace {

Matrix gate_matrix_full(const Gate& g, Index qubits) {
  const Index dim = Index{1} << qubits;
  Matrix m = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Index j = 0; j < dim; ++j) {
    Vector col = m.col(static_cast<Eigen::Index>(j));
    apply_gate(col, g, qubits);
    m.col(static_cast<Eigen::Index>(j)) = col;
  }
  return m;
}

void check_dense_size(Index qubits) {
  if (qubits > kMaxDenseMatrixQubits) {
    throw std::invalid_argument("dense-matrix backend supports at most " + std::to_string(kMaxDenseMatrixQubits) +
                                " qubits");
  }
}

}  // namespace

Vector run_dense_matrix(const QuantumCircuit& c) {
  check_dense_size(c.qubits());
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(Index{1} << c.qubits()));
  psi(0) = 1;
  for (const auto& g : c.gates()) psi = gate_matrix_full(g, c.qubits()) * psi;
  return psi;
}

Matrix circuit_unitary(const QuantumCircuit& c) {
  check_dense_size(c.qubits());
  const Index dim = Index{1} << c.qubits();
  Matrix u = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Index j = 0; j < dim; ++j) {
    Vector col = u.col(static_cast<Eigen::Index>(j));
    for (const auto& g : c.gates()) apply_gate(col, g, c.qubits());
    u.col(static_cast<Eigen::Index>(j)) = col;
  }
  return u;
}

// ------------------------------------------------------------ MPS backends

TensorTrain zero_state(Index qubits) {
  if (qubits == 0) throw std::invalid_argument("zero_state: need at least one qubit");
  return TensorTrain::product_state(std::vector<Index>(qubits, 0), std::vector<Index>(qubits, 2));
}

namespace {

void renormalize_center(TensorTrain& psi) {
  DenseTensor& c = psi.core(*psi.center());
  const double n = c.norm();
  if (n == 0.0) throw std::runtime_error("gate application produced a zero state");
  c.scale(1.0 / n);
}

double apply_adjacent(TensorTrain& psi, const DenseTensor& gate, Index lo, const GateApplyOptions& opt) {
  move_center(psi, lo);
  DenseTensor theta = contract(psi.core(lo), psi.core(lo + 1), {{2, 0}});  // l i1 i2 r
  theta = contract(gate, theta, {{2, 1}, {3, 2}});                        // o1 o2 l r
  theta = permute(theta, {2, 0, 1, 3});
  Factorization f = svd_truncate(theta, 2, opt.spec, Absorb::Right, 1);
  psi.core(lo) = std::move(f.left);
  psi.core(lo + 1) = std::move(f.right);
  psi.set_center(lo + 1);
  if (opt.renormalize) renormalize_center(psi);
  return 1.0 - f.discarded_weight;
}

Gate relabeled(const Gate& g, Index from, Index to) {
  Gate out = g;
  for (Index& q : out.sites)
    if (q == from) q = to;
  return out;
}

}  // namespace

double apply_gate(TensorTrain& psi, const Gate& g, const GateApplyOptions& opt) {
  for (Index q : g.sites) {
    if (q >= psi.size()) throw std::out_of_range("apply_gate: qubit out of range");
  }
  if (g.arity() == 1) {
    const Index k = g.sites[0];
    if (!g.unitary) move_center(psi, k);
    DenseTensor u = DenseTensor::from_matrix(g.matrix);
    psi.core(k) = permute(contract(u, psi.core(k), {{1, 1}}), {1, 0, 2});
    if (!g.unitary && opt.renormalize) renormalize_center(psi);
    return 1.0;
  }
  const Index lo = std::min(g.sites[0], g.sites[1]);
  const Index hi = std::max(g.sites[0], g.sites[1]);
  if (hi == lo + 1) return apply_adjacent(psi, two_site_tensor(g), lo, opt);

  if (opt.route == LongRangeRoute::SwapNetwork) {
    double f = 1.0;
    const DenseTensor swap = two_site_tensor(Gate::swap(0, 1));
    for (Index s = hi - 1; s > lo; --s) f *= apply_adjacent(psi, swap, s, opt);
    f *= apply_adjacent(psi, two_site_tensor(relabeled(g, hi, lo + 1)), lo, opt);
    for (Index s = lo + 1; s < hi; ++s) f *= apply_adjacent(psi, swap, s, opt);
    return f;
  }
  ApplyResult applied = apply_zipup(gate_to_mpo(g, psi.size()), psi, TruncationSpec::exact());
  CompressResult r = compress(applied.train, opt.spec);
  psi = std::move(r.train);
  if (opt.renormalize) renormalize_center(psi);
  return 1.0 - r.discarded_weight;
}

TebdResult run_tebd(const QuantumCircuit& c, const TruncationSpec& spec, LongRangeRoute route,
                    const std::optional<TensorTrain>& initial) {
  TebdResult res;
  res.state = initial ? *initial : zero_state(c.qubits());
  if (res.state.size() != c.qubits()) throw std::invalid_argument("run_tebd: initial state has wrong size");
  GateApplyOptions opt{spec, route, true};
  for (const auto& g : c.gates()) {
    const double f = apply_gate(res.state, g, opt);
    if (g.arity() == 2) {
      res.gate_fidelities.push_back(f);
      res.fidelity *= f;
    }
    res.max_bond = std::max(res.max_bond, res.state.max_bond());
  }
  return res;
}

TensorTrain run_mps_exact(const QuantumCircuit& c, LongRangeRoute route) {
  return run_tebd(c, TruncationSpec::exact(), route).state;
}

TensorTrainOperator gate_to_mpo(const Gate& g, Index qubits) {
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < qubits; ++k) cores.push_back(DenseTensor());
  for (Index q : g.sites) {
    if (q >= qubits) throw std::out_of_range("gate_to_mpo: qubit out of range");
  }
  if (g.arity() == 1) {
    for (Index k = 0; k < qubits; ++k) {
      Matrix m = k == g.sites[0] ? g.matrix : Matrix::Identity(2, 2);
      cores[k] = DenseTensor::from_matrix(m, {1, 2, 2, 1});
    }
    return TensorTrainOperator(std::move(cores));
  }
  const Index lo = std::min(g.sites[0], g.sites[1]);
  const Index hi = std::max(g.sites[0], g.sites[1]);
  DenseTensor t = permute(two_site_tensor(g), {0, 2, 1, 3});  // o_lo i_lo o_hi i_hi
  Factorization f = svd_truncate(t, 2, TruncationSpec::exact(), Absorb::Right, 1);
  const Index k = f.rank();
  for (Index q = 0; q < qubits; ++q) {
    if (q < lo || q > hi) {
      cores[q] = DenseTensor::from_matrix(Matrix::Identity(2, 2), {1, 2, 2, 1});
    } else if (q == lo) {
      cores[q] = f.left.reshaped({1, 2, 2, k});
    } else if (q == hi) {
      cores[q] = f.right.reshaped({k, 2, 2, 1});
    } else {
      DenseTensor pass({k, 2, 2, k});
      for (Index b = 0; b < k; ++b)
        for (Index s = 0; s < 2; ++s) pass({b, s, s, b}) = 1.0;
      cores[q] = std::move(pass);
    }
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator circuit_to_mpo(const QuantumCircuit& c, const TruncationSpec& spec) {
  TensorTrainOperator acc = TensorTrainOperator::identity(std::vector<Index>(c.qubits(), 2));
  for (const auto& g : c.gates()) acc = op_product(gate_to_mpo(g, c.qubits()), acc, spec);
  return acc;
}

CnotFactors cnot_factorized() {
  CnotFactors f{DenseTensor({2, 2, 2}), DenseTensor({2, 2, 2})};
  f.control({0, 0, 0}) = 1.0;
  f.control({1, 1, 1}) = 1.0;
  f.target({0, 0, 0}) = 1.0;
  f.target({0, 1, 1}) = 1.0;
  f.target({1, 0, 1}) = 1.0;
  f.target({1, 1, 0}) = 1.0;
  return f;
}

// ------------------------------------------------------------ fitting

FitResult fit_circuit(const QuantumCircuit& slice, const TensorTrain& start, Index chi, FitMode mode, Index sweeps,
                      const std::optional<TensorTrain>& guess) {
  TensorTrain g = guess ? *guess : run_tebd(slice, TruncationSpec::rank(chi), LongRangeRoute::Mpo, start).state;
  return fit_apply(circuit_to_mpo(slice), start, g, {mode, chi, sweeps});
}

namespace {

// Gates grouped by layer windows; within a window the list order is kept.
std::vector<QuantumCircuit> layer_windows(const QuantumCircuit& c, Index width) {
  if (width == 0) throw std::invalid_argument("layer window width must be positive");
  const auto layers = c.layers();
  const Index depth = c.depth();
  std::vector<QuantumCircuit> out;
  for (Index start = 0; start < depth; start += width) {
    QuantumCircuit w(c.qubits());
    for (Index k = 0; k < c.size(); ++k)
      if (layers[k] >= start && layers[k] < start + width) w.add(c.gates()[k]);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

FittedRun run_fitted(const QuantumCircuit& c, Index chi, Index slice_depth, FitMode mode, Index sweeps) {
  FittedRun run{zero_state(c.qubits()), 1.0, {}};
  for (const auto& w : layer_windows(c, slice_depth)) {
    FitResult r = fit_circuit(w, run.state, chi, mode, sweeps);
    run.state = std::move(r.train);
    normalize(run.state);
    run.slice_fidelities.push_back(r.fidelity);
    run.fidelity *= r.fidelity;
  }
  return run;
}

// ------------------------------------------------------------ amplitudes

Scalar amplitude(const QuantumCircuit& c, const std::vector<Index>& bits, const TruncationSpec& spec) {
  if (bits.size() != c.qubits()) throw std::invalid_argument("amplitude: bitstring length must equal qubit count");
  for (Index b : bits)
    if (b > 1) throw std::invalid_argument("amplitude: bits must be 0 or 1");
  const auto layers = c.layers();
  const Index half = (c.depth() + 1) / 2;
  QuantumCircuit forward(c.qubits()), backward(c.qubits());
  for (Index k = 0; k < c.size(); ++k) (layers[k] < half ? forward : backward).add(c.gates()[k]);
  TensorTrain fwd = run_tebd(forward, spec).state;
  TensorTrain start = TensorTrain::product_state(bits, std::vector<Index>(c.qubits(), 2));
  TensorTrain back = run_tebd(backward.inverse(), spec, LongRangeRoute::Mpo, start).state;
  return inner(back, fwd);
}

AmplitudeSampler::AmplitudeSampler(const QuantumCircuit& c) : circuit_(c) {
  TensorTrain psi = zero_state(c.qubits());
  prefix_states_.push_back(psi);
  GateApplyOptions opt;
  for (const auto& g : c.gates()) {
    apply_gate(psi, g, opt);
    prefix_states_.push_back(psi);
  }
}

std::vector<Index> AmplitudeSampler::sample(RandomSource& rng) const {
  std::vector<Index> bits(circuit_.qubits(), 0);
  for (Index n = 0; n < circuit_.size(); ++n) {
    const auto& sites = circuit_.gates()[n].sites;
    const Index options = Index{1} << sites.size();
    std::vector<double> weight(options);
    double total = 0.0;
    for (Index y = 0; y < options; ++y) {
      for (Index k = 0; k < sites.size(); ++k) bits[sites[k]] = (y >> k) & 1;
      weight[y] = std::norm(evaluate(prefix_states_[n + 1], bits));
      total += weight[y];
    }
    if (!(total > 0.0)) throw std::logic_error("sampler: all conditional amplitudes vanished");
    double u = rng.uniform() * total;
    Index pick = options - 1;
    while (weight[pick] == 0.0) --pick;
    for (Index y = 0; y < options; ++y) {
      if (weight[y] > 0.0 && u < weight[y]) {
        pick = y;
        break;
      }
      u -= weight[y];
    }
    for (Index k = 0; k < sites.size(); ++k) bits[sites[k]] = (pick >> k) & 1;
  }
  return bits;
}

std::vector<Index> sample_by_amplitudes(const QuantumCircuit& c, RandomSource& rng) {
  return AmplitudeSampler(c).sample(rng);
}

}  // namespace tnkit
