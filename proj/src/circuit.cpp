#include "tnkit/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace tnkit {

namespace {

constexpr Scalar kI{0.0, 1.0};

Matrix mat2(Scalar a, Scalar b, Scalar c, Scalar d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Gate make(GateKind kind, std::vector<Index> sites, std::vector<double> params, Matrix m) {
  Gate g;
  g.kind = kind;
  g.sites = std::move(sites);
  g.params = std::move(params);
  g.matrix = std::move(m);
  return g;
}

void check_unitary(const Matrix& m) {
  const double dev = (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-12) throw std::invalid_argument("gate matrix is not unitary (deviation " + std::to_string(dev) + ")");
}

std::string upper(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

std::string Gate::name() const {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::T: return "T";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::U: return "U";
    case GateKind::Matrix1: return "MATRIX1";
    case GateKind::CNOT: return "CNOT";
    case GateKind::SWAP: return "SWAP";
    case GateKind::Matrix2: return "MATRIX2";
  }
  return "?";
}

Gate Gate::dagger() const {
  Gate g = *this;
  g.matrix = matrix.adjoint();
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: g.params = {-params[0]}; break;
    case GateKind::U: g.params = {-params[0], -params[2], -params[1]}; break;
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::H:
    case GateKind::CNOT:
    case GateKind::SWAP: break;
    case GateKind::T:
    case GateKind::Matrix1: g.kind = GateKind::Matrix1; g.params.clear(); break;
    case GateKind::Matrix2: break;
  }
  return g;
}

Gate Gate::x(Index q) { return make(GateKind::X, {q}, {}, mat2(0, 1, 1, 0)); }
Gate Gate::y(Index q) { return make(GateKind::Y, {q}, {}, mat2(0, -kI, kI, 0)); }
Gate Gate::z(Index q) { return make(GateKind::Z, {q}, {}, mat2(1, 0, 0, -1)); }
Gate Gate::h(Index q) {
  const double s = 1.0 / std::sqrt(2.0);
  return make(GateKind::H, {q}, {}, mat2(s, s, s, -s));
}
Gate Gate::t(Index q) {
  const double a = std::numbers::pi / 8;
  return make(GateKind::T, {q}, {}, mat2(std::exp(kI * a), 0, 0, std::exp(-kI * a)));
}
Gate Gate::rx(Index q, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  return make(GateKind::RX, {q}, {angle}, mat2(c, -kI * s, -kI * s, c));
}
Gate Gate::ry(Index q, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  return make(GateKind::RY, {q}, {angle}, mat2(c, -s, s, c));
}
Gate Gate::rz(Index q, double angle) {
  return make(GateKind::RZ, {q}, {angle}, mat2(std::exp(-kI * (angle / 2)), 0, 0, std::exp(kI * (angle / 2))));
}
Gate Gate::u(Index q, double theta, double phi, double lambda) {
  Matrix m = rz(q, phi).matrix * ry(q, theta).matrix * rz(q, lambda).matrix;
  return make(GateKind::U, {q}, {theta, phi, lambda}, m);
}
Gate Gate::cnot(Index control, Index target) {
  if (control == target) throw std::invalid_argument("CNOT needs two distinct qubits");
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
  return make(GateKind::CNOT, {control, target}, {}, m);
}
Gate Gate::swap(Index a, Index b) {
  if (a == b) throw std::invalid_argument("SWAP needs two distinct qubits");
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
  return make(GateKind::SWAP, {a, b}, {}, m);
}
Gate Gate::single(const Matrix& m, Index q, bool check) {
  if (m.rows() != 2 || m.cols() != 2) throw std::invalid_argument("single-qubit gate needs a 2x2 matrix");
  if (check) check_unitary(m);
  Gate g = make(GateKind::Matrix1, {q}, {}, m);
  g.unitary = check;
  return g;
}
Gate Gate::two(const Matrix& m, Index first, Index second, bool check) {
  if (m.rows() != 4 || m.cols() != 4) throw std::invalid_argument("two-qubit gate needs a 4x4 matrix");
  if (first == second) throw std::invalid_argument("two-qubit gate needs two distinct qubits");
  if (check) check_unitary(m);
  Gate g = make(GateKind::Matrix2, {first, second}, {}, m);
  g.unitary = check;
  return g;
}

QuantumCircuit& QuantumCircuit::add(Gate g) {
  if (g.arity() != 1 && g.arity() != 2) throw std::invalid_argument("gate must act on one or two qubits");
  for (Index q : g.sites) {
    if (q >= qubits_) {
      throw std::out_of_range("gate " + g.name() + " acts on qubit " + std::to_string(q) + " of a " +
                              std::to_string(qubits_) + "-qubit circuit");
    }
  }
  gates_.push_back(std::move(g));
  return *this;
}

std::vector<Index> QuantumCircuit::layers() const {
  std::vector<Index> next_free(qubits_, 0), out;
  for (const auto& g : gates_) {
    Index layer = 0;
    for (Index q : g.sites) layer = std::max(layer, next_free[q]);
    for (Index q : g.sites) next_free[q] = layer + 1;
    out.push_back(layer);
  }
  return out;
}

Index QuantumCircuit::depth() const {
  Index d = 0;
  for (Index l : layers()) d = std::max(d, l + 1);
  return d;
}

QuantumCircuit QuantumCircuit::slice(Index begin, Index end) const {
  if (begin > end || end > gates_.size()) throw std::out_of_range("QuantumCircuit::slice: bad range");
  QuantumCircuit c(qubits_);
  for (Index k = begin; k < end; ++k) c.gates_.push_back(gates_[k]);
  return c;
}

QuantumCircuit QuantumCircuit::inverse() const {
  QuantumCircuit c(qubits_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) c.gates_.push_back(it->dagger());
  return c;
}

std::string QuantumCircuit::to_text() const {
  std::ostringstream out;
  out << "qubits " << qubits_ << "\n";
  for (const auto& g : gates_) {
    if (g.kind == GateKind::Matrix1 || g.kind == GateKind::Matrix2) {
      throw std::invalid_argument("to_text: matrix gates have no text form");
    }
    out << g.name();
    for (Index q : g.sites) out << ' ' << q;
    for (double p : g.params) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.17g", p);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

QuantumCircuit parse_circuit(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  Index line_no = 0;
  std::optional<QuantumCircuit> circuit;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("circuit line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    name = upper(name);
    std::vector<std::string> args;
    for (std::string a; ls >> a;) args.push_back(a);
    if (!circuit) {
      if (name != "QUBITS" || args.size() != 1) fail("expected 'qubits N' before any gate");
      try {
        circuit.emplace(static_cast<Index>(std::stoul(args[0])));
      } catch (const std::exception&) {
        fail("bad qubit count '" + args[0] + "'");
      }
      continue;
    }
    struct Shape {
      Index qubits;
      Index angles;
    };
    Shape shape{1, 0};
    if (name == "RX" || name == "RY" || name == "RZ") shape = {1, 1};
    else if (name == "U") shape = {1, 3};
    else if (name == "CNOT" || name == "CX" || name == "SWAP") shape = {2, 0};
    else if (name != "X" && name != "Y" && name != "Z" && name != "H" && name != "T") fail("unknown gate '" + name + "'");
    if (args.size() != shape.qubits + shape.angles) {
      fail(name + " expects " + std::to_string(shape.qubits) + " qubit(s) and " + std::to_string(shape.angles) +
           " angle(s)");
    }
    std::vector<Index> q;
    std::vector<double> a;
    try {
      for (Index k = 0; k < shape.qubits; ++k) {
        if (args[k].find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument("qubit");
        q.push_back(static_cast<Index>(std::stoul(args[k])));
      }
      for (Index k = 0; k < shape.angles; ++k) {
        std::size_t used = 0;
        a.push_back(std::stod(args[shape.qubits + k], &used));
        if (used != args[shape.qubits + k].size()) throw std::invalid_argument("angle");
      }
    } catch (const std::exception&) {
      fail("malformed operand in '" + line + "'");
    }
    Gate g;
    if (name == "X") g = Gate::x(q[0]);
    else if (name == "Y") g = Gate::y(q[0]);
    else if (name == "Z") g = Gate::z(q[0]);
    else if (name == "H") g = Gate::h(q[0]);
    else if (name == "T") g = Gate::t(q[0]);
    else if (name == "RX") g = Gate::rx(q[0], a[0]);
    else if (name == "RY") g = Gate::ry(q[0], a[0]);
    else if (name == "RZ") g = Gate::rz(q[0], a[0]);
    else if (name == "U") g = Gate::u(q[0], a[0], a[1], a[2]);
    else if (name == "SWAP") {
      if (q[0] == q[1]) fail("SWAP needs two distinct qubits");
      g = Gate::swap(q[0], q[1]);
    } else {
      if (q[0] == q[1]) fail("CNOT needs two distinct qubits");
      g = Gate::cnot(q[0], q[1]);
    }
    try {
      circuit->add(std::move(g));
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  if (!circuit) throw std::invalid_argument("circuit: missing 'qubits N' header");
  return *circuit;
}

QuantumCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_circuit(ss.str());
}

QuantumCircuit random_circuit(Index qubits, Index depth, RandomSource& rng) {
  QuantumCircuit c(qubits);
  for (Index layer = 0; layer < depth; ++layer) {
    for (Index q = 0; q < qubits; ++q) {
      const double theta = std::acos(1.0 - 2.0 * rng.uniform());
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      const double lambda = 2.0 * std::numbers::pi * rng.uniform();
      c.add(Gate::u(q, theta, phi, lambda));
    }
    for (Index q = layer % 2; q + 1 < qubits; q += 2) c.add(Gate::cnot(q, q + 1));
  }
  return c;
}

QuantumCircuit ghz_circuit(Index qubits) {
  QuantumCircuit c(qubits);
  if (qubits == 0) return c;
  c.add(Gate::h(0));
  for (Index q = 0; q + 1 < qubits; ++q) c.add(Gate::cnot(q, q + 1));
  return c;
}

DenseTensor two_site_tensor(const Gate& g) {
  if (g.arity() != 2) throw std::invalid_argument("two_site_tensor: gate is not two-qubit");
  DenseTensor t({2, 2, 2, 2});
  for (Index of = 0; of < 2; ++of)
    for (Index os = 0; os < 2; ++os)
      for (Index inf = 0; inf < 2; ++inf)
        for (Index ins = 0; ins < 2; ++ins) t({of, os, inf, ins}) = g.matrix(2 * of + os, 2 * inf + ins);
  if (g.sites[0] > g.sites[1]) t = permute(t, {1, 0, 3, 2});
  return t;
}

}  // namespace tnkit
