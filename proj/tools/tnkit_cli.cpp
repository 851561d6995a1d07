// tnkit command-line front end. Every command writes CSV (header row, full
// double precision) to --out or stdout, and a JSON summary to --summary or,
// when --out is given, to stdout.

#include "tnkit/circuit.hpp"
#include "tnkit/io.hpp"
#include "tnkit/quantics.hpp"
#include "tnkit/simulate.hpp"
#include "tnkit/solvers.hpp"
#include "tnkit/tci.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

using namespace tnkit;
using json = nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) text_ += (k ? "," : "") + fields[k];
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct Output {
  std::string out;
  std::string summary;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--out", out, "CSV output path (stdout when omitted)");
    cmd->add_option("--summary", summary, "JSON summary path");
  }
  void emit(const Csv& csv, const json& info) const {
    if (out.empty())
      std::cout << csv.text();
    else
      write_file_atomic(out, csv.text());
    const std::string dump = info.dump(2) + "\n";
    if (!summary.empty())
      write_file_atomic(summary, dump);
    else if (!out.empty())
      std::cout << dump;
  }
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Vector dense_vector(const TensorTrain& tt) {
  const DenseTensor d = to_dense(tt);
  return Eigen::Map<const Vector>(d.data().data(), static_cast<Eigen::Index>(d.data().size()));
}

std::string bitstring(Index value, Index qubits) {
  std::string s(qubits, '0');
  for (Index q = 0; q < qubits; ++q)
    if ((value >> q) & 1) s[q] = '1';
  return s;
}

std::string bitstring(const std::vector<Index>& bits) {
  std::string s;
  for (Index b : bits) s += char('0' + b);
  return s;
}

void check_backend_size(const std::string& backend, Index qubits) {
  if (backend == "statevector" && qubits > kMaxStatevectorQubits)
    throw std::invalid_argument("statevector backend supports at most " + std::to_string(kMaxStatevectorQubits) +
                                " qubits, got " + std::to_string(qubits));
  if (backend == "dense-matrix" && qubits > kMaxDenseMatrixQubits)
    throw std::invalid_argument("dense-matrix backend supports at most " + std::to_string(kMaxDenseMatrixQubits) +
                                " qubits, got " + std::to_string(qubits));
}

TruncationSpec truncation(Index chi, double tol) {
  TruncationSpec spec;
  if (chi > 0) spec.max_rank = chi;
  spec.tol = tol;
  return spec;
}

LongRangeRoute parse_route(const std::string& name) {
  return name == "swap" ? LongRangeRoute::SwapNetwork : LongRangeRoute::Mpo;
}

std::vector<std::uint64_t> sample_indices(std::uint64_t points, Index stride) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 0; n < points; n += stride) out.push_back(n);
  return out;
}

Index default_stride(std::uint64_t points) { return std::max<std::uint64_t>(1, points / 1024); }

// ------------------------------------------------------------ ghz-bench

struct GhzArgs {
  Index max_qubits = 20;
  Index min_qubits = 2;
  Index stride = 1;
  std::vector<std::string> backends{"mps", "statevector"};
};

void run_ghz_bench(const GhzArgs& a, const Output& o) {
  if (a.min_qubits < 1 || a.min_qubits > a.max_qubits) throw std::invalid_argument("need 1 <= --min-qubits <= --qubits");
  for (const auto& b : a.backends) check_backend_size(b, a.max_qubits);
  Csv csv({"qubits", "backend", "seconds", "max_bond"});
  for (Index n = a.min_qubits; n <= a.max_qubits; n += std::max<Index>(1, a.stride)) {
    const QuantumCircuit c = ghz_circuit(n);
    for (const auto& b : a.backends) {
      std::string bond;
      Stopwatch clock;
      if (b == "mps") {
        const TensorTrain psi = run_mps_exact(c);
        bond = std::to_string(psi.max_bond());
      } else if (b == "statevector") {
        run_statevector(c);
      } else {
        run_dense_matrix(c);
      }
      const double t = clock.seconds();
      csv.row({std::to_string(n), b, num(t), bond});
    }
  }
  o.emit(csv, json{{"command", "ghz-bench"}, {"max_qubits", a.max_qubits}, {"backends", a.backends}});
}

// ------------------------------------------------------------ circuit-run

struct CircuitArgs {
  std::string file;
  std::string backend = "mps";
  std::string route = "mpo";
  Index chi = 0;
  double tol = 0.0;
  Index samples = 0;
  std::uint64_t seed = 0;
  bool cross_check = false;
  std::string trace;
};

constexpr Index kMaxListedQubits = 20;
constexpr double kListedAmplitude = 1e-15;

void run_circuit(const CircuitArgs& a, const Output& o) {
  const QuantumCircuit c = load_circuit(a.file);
  const Index n = c.qubits();
  check_backend_size(a.backend, n);
  if (a.samples == 0 && n > kMaxListedQubits)
    throw std::invalid_argument("amplitude listing supports at most " + std::to_string(kMaxListedQubits) +
                                " qubits; use --samples");
  json info{{"command", "circuit-run"}, {"qubits", n}, {"gates", c.size()}, {"depth", c.depth()},
            {"backend", a.backend}};
  RandomSource rng(a.seed);
  Vector amplitudes;
  std::optional<TensorTrain> mps;
  std::optional<Csv> trace;
  Stopwatch clock;
  if (a.backend == "mps") {
    TebdResult r = run_tebd(c, truncation(a.chi, a.tol), parse_route(a.route));
    info["fidelity"] = r.fidelity;
    info["max_bond"] = r.max_bond;
    if (!a.trace.empty()) {
      trace.emplace(std::vector<std::string>{"gate", "name", "fidelity", "cumulative"});
      double cumulative = 1.0;
      for (Index g = 0; g < r.gate_fidelities.size(); ++g) {
        cumulative *= r.gate_fidelities[g];
        trace->row({std::to_string(g), c.gates()[g].name(), num(r.gate_fidelities[g]), num(cumulative)});
      }
    }
    mps = std::move(r.state);
  } else if (a.backend == "statevector") {
    amplitudes = run_statevector(c);
  } else {
    amplitudes = run_dense_matrix(c);
  }
  info["seconds"] = clock.seconds();

  auto finish = [&](const Csv& csv) {
    if (trace) write_file_atomic(a.trace, trace->text());
    o.emit(csv, info);
  };

  if (a.cross_check) {
    if (n > 10) throw std::invalid_argument("--cross-check supports at most 10 qubits");
    const Vector reference = run_statevector(c);
    const Vector mine = mps ? dense_vector(*mps) : amplitudes;
    info["cross_check_max_error"] = (mine - reference).cwiseAbs().maxCoeff();
  }

  if (a.samples > 0) {
    Csv csv({"shot", "bits"});
    if (mps) {
      const auto shots = sample_many(*mps, rng, a.samples);
      for (Index s = 0; s < shots.size(); ++s) csv.row({std::to_string(s), bitstring(shots[s])});
    } else {
      std::vector<double> cumulative(amplitudes.size());
      double total = 0.0;
      for (Eigen::Index k = 0; k < amplitudes.size(); ++k) cumulative[k] = total += std::norm(amplitudes(k));
      for (Index s = 0; s < a.samples; ++s) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const Index k = std::min<Index>(it - cumulative.begin(), cumulative.size() - 1);
        csv.row({std::to_string(s), bitstring(k, n)});
      }
    }
    finish(csv);
    return;
  }
  if (mps) amplitudes = dense_vector(*mps);
  Csv csv({"index", "bits", "re", "im"});
  for (Eigen::Index k = 0; k < amplitudes.size(); ++k)
    if (std::abs(amplitudes(k)) > kListedAmplitude)
      csv.row({std::to_string(k), bitstring(k, n), num(amplitudes(k).real()), num(amplitudes(k).imag())});
  finish(csv);
}

// ------------------------------------------------------------ fidelity-sweep

struct FidelityArgs {
  Index qubits = 10;
  Index depth = 20;
  std::vector<Index> chis{4, 8, 16};
  std::uint64_t seed = 0;
};

constexpr Index kMaxExactFidelityQubits = 12;

void run_fidelity_sweep(const FidelityArgs& a, const Output& o) {
  if (a.qubits < 2) throw std::invalid_argument("fidelity-sweep needs at least 2 qubits");
  for (Index chi : a.chis)
    if (chi == 0) throw std::invalid_argument("--chi values must be positive");
  RandomSource rng(a.seed);
  const QuantumCircuit c = random_circuit(a.qubits, a.depth, rng);
  // Each layer opens with the rotation on qubit 0.
  std::vector<Index> layer_end;
  for (Index g = 1; g < c.size(); ++g)
    if (c.gates()[g].arity() == 1 && c.gates()[g].sites[0] == 0) layer_end.push_back(g);
  layer_end.push_back(c.size());

  const bool exact = a.qubits <= kMaxExactFidelityQubits;
  Csv csv({"depth", "chi", "fidelity_estimate", "fidelity_exact", "max_bond"});
  GateApplyOptions opts;
  for (Index chi : a.chis) {
    opts.spec = TruncationSpec::rank(chi);
    TensorTrain psi = zero_state(a.qubits);
    Vector sv = Vector::Zero(Eigen::Index(1) << a.qubits);
    if (exact) sv(0) = 1.0;
    double fidelity = 1.0;
    Index g = 0;
    for (Index layer = 0; layer < layer_end.size(); ++layer) {
      for (; g < layer_end[layer]; ++g) {
        fidelity *= apply_gate(psi, c.gates()[g], opts);
        if (exact) apply_gate(sv, c.gates()[g], a.qubits);
      }
      std::string overlap;
      if (exact) overlap = num(std::norm(sv.dot(dense_vector(psi))));
      csv.row({std::to_string(layer + 1), std::to_string(chi), num(fidelity), overlap, std::to_string(psi.max_bond())});
    }
  }
  o.emit(csv, json{{"command", "fidelity-sweep"}, {"qubits", a.qubits}, {"depth", a.depth}, {"seed", a.seed},
                   {"chi", a.chis}, {"exact", exact}});
}

// ------------------------------------------------------------ tfi

struct TfiArgs {
  std::string mode = "dmrg";
  TfiModel model{.spins = 8, .j = 1.0, .hz = 0.0, .hx = 1.0};
  Index chi = 32;
  double eta = 0.1;
  double tau_max = 10.0;
  int order = 2;
  Index measure_every = 10;
  Index sweeps = 20;
  std::uint64_t seed = 0;
};

void run_tfi(const TfiArgs& a, const Output& o) {
  a.model.validate();
  json info{{"command", "tfi"}, {"mode", a.mode}, {"spins", a.model.spins}, {"j", a.model.j},
            {"hz", a.model.hz}, {"hx", a.model.hx}, {"chi", a.chi}};
  if (a.mode == "dmrg") {
    DmrgOptions opt;
    opt.chi_schedule = {a.chi};
    opt.max_sweeps = a.sweeps;
    RandomSource rng(a.seed);
    const TensorTrain guess = TensorTrain::random(std::vector<Index>(a.model.spins, 2), std::min<Index>(a.chi, 4), rng);
    Stopwatch clock;
    const DmrgResult r = dmrg_min_eig(tfi_mpo(a.model), guess, opt);
    info["seconds"] = clock.seconds();
    info["energy"] = r.energy;
    info["converged"] = r.converged;
    Csv csv({"sweep", "energy", "max_bond"});
    for (Index s = 0; s < r.report.values.size(); ++s)
      csv.row({std::to_string(s + 1), num(r.report.values[s]), std::to_string(r.report.max_bonds[s])});
    o.emit(csv, info);
    return;
  }
  ImaginaryTebdOptions opt;
  opt.eta = a.eta;
  opt.tau_max = a.tau_max;
  opt.spec = TruncationSpec::rank(a.chi);
  opt.order = a.order;
  opt.measure_every = a.measure_every;
  Stopwatch clock;
  const ImaginaryTebdResult r = imaginary_tebd_ground_state(a.model, opt);
  info["seconds"] = clock.seconds();
  info["energy"] = r.energy;
  info["eta"] = a.eta;
  Csv csv({"tau", "energy", "max_bond"});
  for (Index k = 0; k < r.times.size(); ++k)
    csv.row({num(r.times[k]), num(r.energies[k]), std::to_string(r.max_bonds[k])});
  o.emit(csv, info);
}

// ------------------------------------------------------------ integrate

struct IntegrateArgs {
  std::string integrand = "oscillatory";
  Index dims = 10;
  std::string rule = "gk41";
  double lo = -1.0;
  double hi = 1.0;
  double tol = 1e-12;
  Index chi = 200;
  Index sweeps = 60;
  std::string search = "rook";
};

std::function<Scalar(const std::vector<double>&)> builtin_integrand(const std::string& name) {
  if (name == "constant") return [](const std::vector<double>&) { return Scalar(1.0); };
  if (name == "gaussian")
    return [](const std::vector<double>& x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return Scalar(std::exp(-s));
    };
  if (name == "oscillatory")  // 1000 cos(10 |x|^2) exp(-(sum x)^4 / 1000)
    return [](const std::vector<double>& x) {
      double s2 = 0.0, s = 0.0;
      for (double v : x) {
        s2 += v * v;
        s += v;
      }
      return Scalar(1e3 * std::cos(10.0 * s2) * std::exp(-1e-3 * s * s * s * s));
    };
  throw std::invalid_argument("unknown integrand '" + name + "' (constant, gaussian, oscillatory)");
}

void run_integrate(const IntegrateArgs& a, const Output& o) {
  TciOptions opt;
  opt.tol = a.tol;
  opt.max_rank = a.chi;
  opt.max_sweeps = a.sweeps;
  opt.search = a.search == "full" ? PivotSearch::Full : PivotSearch::Rook;
  const auto f = builtin_integrand(a.integrand);
  const QuadratureRule rule = quadrature_rule(a.rule);
  Stopwatch clock;
  const IntegrationResult r = integrate(f, a.dims, a.lo, a.hi, rule, opt);
  const double seconds = clock.seconds();
  Csv csv({"evaluations", "estimate"});
  for (const auto& [calls, value] : r.trace) csv.row({std::to_string(calls), num(value.real())});
  o.emit(csv, json{{"command", "integrate"}, {"integrand", a.integrand}, {"dims", a.dims}, {"rule", rule.label},
                   {"value", r.value.real()}, {"evaluations", r.evaluations}, {"max_rank", r.max_rank},
                   {"converged", r.converged}, {"seconds", seconds}});
}

// ------------------------------------------------------------ quantics PDEs

struct HeatArgs {
  Index bits = 12;
  double length = 10.0;
  std::vector<double> times{0.0, 0.01, 0.1};
  std::string initial = "oscillating-step";
  Index chi = 128;
  double tol = 1e-12;
  Index stride = 0;
};

GridFunction builtin_initial(const std::string& name, double length) {
  if (name == "oscillating-step")  // [1 + cos(120x) sin(180x)]/100 + step on [7/2, 13/2)
    return [](const std::vector<double>& x) {
      const double v = (1.0 + std::cos(120.0 * x[0]) * std::sin(180.0 * x[0])) / 100.0;
      return Scalar(v + (x[0] >= 3.5 && x[0] < 6.5 ? 1.0 : 0.0));
    };
  if (name == "gaussian")
    return [length](const std::vector<double>& x) {
      const double d = (x[0] - length / 2) / (length / 10);
      return Scalar(std::exp(-d * d));
    };
  if (name == "sine")
    return [length](const std::vector<double>& x) { return Scalar(std::sin(2.0 * std::numbers::pi * x[0] / length)); };
  throw std::invalid_argument("unknown initial condition '" + name + "' (oscillating-step, gaussian, sine)");
}

void run_heat(const HeatArgs& a, const Output& o) {
  if (!(a.length > 0)) throw std::invalid_argument("--length must be positive");
  const QuanticsGrid grid = QuanticsGrid::line(a.bits, 0.0, a.length);
  grid.validate();
  const GridFunction u0 = builtin_initial(a.initial, a.length);
  HeatOptions opt;
  opt.spec = TruncationSpec::both(a.chi, 1e-22);
  opt.tci.tol = a.tol;
  opt.tci.max_rank = a.chi;
  const Index stride = a.stride ? a.stride : default_stride(grid.points());
  Csv csv({"t", "x", "u"});
  json runs = json::array();
  for (double t : a.times) {
    Stopwatch clock;
    const HeatResult r = heat_solve(u0, t, grid, opt);
    runs.push_back({{"t", t}, {"seconds", clock.seconds()}, {"max_bond", r.max_bond}, {"oracle_calls", r.oracle_calls}});
    for (std::uint64_t n : sample_indices(grid.points(), stride))
      csv.row({num(t), num(grid.coordinate(0, n)), num(evaluate(r.solution, grid.encode({n})).real())});
  }
  o.emit(csv, json{{"command", "heat"}, {"bits", a.bits}, {"length", a.length}, {"initial", a.initial},
                   {"runs", runs}});
}

struct PoissonArgs {
  Index bits = 6;
  Index dims = 2;
  std::string ordering = "interleaved";
  double lo = 0.0;
  double hi = 1.0;
  std::string source = "gaussian";
  std::string rho = "linear";
  double rho_scale = 10.0;
  std::string boundary = "open";
  Index chi = 64;
  double tol = 1e-12;
  Index stride = 0;
};

Boundary parse_boundary(const std::string& name) { return name == "periodic" ? Boundary::Periodic : Boundary::Open; }

void write_grid_samples(Csv& csv, const QuanticsGrid& grid, const TensorTrain& tt, Index stride) {
  const auto idx = sample_indices(grid.points(), stride);
  if (grid.dims == 1) {
    for (std::uint64_t n : idx) csv.row({num(grid.coordinate(0, n)), num(evaluate(tt, grid.encode({n})).real())});
    return;
  }
  for (std::uint64_t n : idx)
    for (std::uint64_t m : idx)
      csv.row({num(grid.coordinate(0, n)), num(grid.coordinate(1, m)), num(evaluate(tt, grid.encode({n, m})).real())});
}

void run_poisson(const PoissonArgs& a, const Output& o) {
  if (a.dims < 1 || a.dims > 2) throw std::invalid_argument("poisson supports --dims 1 or 2");
  const QuanticsGrid grid = QuanticsGrid::box(a.bits, a.dims, a.lo, a.hi, parse_ordering(a.ordering));
  grid.validate();
  const double centre = (a.lo + a.hi) / 2, width = (a.hi - a.lo) / 5;
  GridFunction source;
  if (a.source == "gaussian")
    source = [=](const std::vector<double>& x) {
      double r2 = 0.0;
      for (double v : x) r2 += (v - centre) * (v - centre);
      return Scalar(std::exp(-r2 / (width * width)));
    };
  else if (a.source == "dipole")
    source = [=](const std::vector<double>& x) {
      const double d = (x[0] - centre) / width;
      double r2 = 0.0;
      for (double v : x) r2 += (v - centre) * (v - centre);
      return Scalar(d * std::exp(-r2 / (width * width)));
    };
  else
    throw std::invalid_argument("unknown source '" + a.source + "' (gaussian, dipole)");
  GridFunction rho;
  const double s = a.rho_scale;
  if (a.rho == "zero")
    rho = [](const std::vector<double>&) { return Scalar(0.0); };
  else if (a.rho == "constant")
    rho = [s](const std::vector<double>&) { return Scalar(s); };
  else if (a.rho == "linear")
    rho = [s, lo = a.lo, hi = a.hi](const std::vector<double>& x) { return Scalar(s * (x[0] - lo) / (hi - lo)); };
  else
    throw std::invalid_argument("unknown rho '" + a.rho + "' (zero, constant, linear)");
  const Boundary boundary = parse_boundary(a.boundary);
  if (boundary == Boundary::Periodic && (a.rho == "zero" || !(s > 0)))
    throw std::invalid_argument("periodic boundaries need a positive rho (the Laplacian alone is singular)");

  PoissonOptions opt;
  opt.boundary = boundary;
  opt.tci.tol = a.tol;
  opt.tci.max_rank = a.chi;
  opt.als.max_rank = a.chi;
  Stopwatch clock;
  const PoissonResult r = poisson_solve(source, rho, grid, opt);
  const double seconds = clock.seconds();
  Csv csv(a.dims == 1 ? std::vector<std::string>{"x", "u"} : std::vector<std::string>{"x", "y", "u"});
  write_grid_samples(csv, grid, r.solution, a.stride ? a.stride : default_stride(grid.points()));
  o.emit(csv, json{{"command", "poisson"}, {"bits", a.bits}, {"dims", a.dims}, {"ordering", a.ordering},
                   {"boundary", a.boundary}, {"residual", r.residual}, {"normal_equations", r.normal_equations},
                   {"max_bond", r.solution.max_bond()}, {"seconds", seconds}});
}

struct SchrodingerArgs {
  Index bits = 8;
  double lo = -8.0;
  double hi = 8.0;
  std::string potential = "harmonic";
  std::string boundary = "open";
  Index chi = 32;
  Index sweeps = 20;
  Index stride = 0;
};

void run_schrodinger(const SchrodingerArgs& a, const Output& o) {
  const QuanticsGrid grid = QuanticsGrid::line(a.bits, a.lo, a.hi);
  grid.validate();
  GridFunction v;
  if (a.potential == "harmonic")
    v = [](const std::vector<double>& x) { return Scalar(x[0] * x[0]); };
  else if (a.potential == "double-well")
    v = [](const std::vector<double>& x) { return Scalar((x[0] * x[0] - 4.0) * (x[0] * x[0] - 4.0) / 4.0); };
  else if (a.potential == "box")
    v = [](const std::vector<double>&) { return Scalar(0.0); };
  else
    throw std::invalid_argument("unknown potential '" + a.potential + "' (harmonic, double-well, box)");
  DmrgOptions opt;
  opt.chi_schedule = {a.chi};
  opt.max_sweeps = a.sweeps;
  Stopwatch clock;
  SchrodingerResult r = schrodinger_ground_state(v, grid, parse_boundary(a.boundary), opt);
  const double seconds = clock.seconds();
  // Fix the global phase so the largest sampled component is positive.
  const auto idx = sample_indices(grid.points(), a.stride ? a.stride : default_stride(grid.points()));
  Scalar peak = 0.0;
  for (std::uint64_t n : idx) {
    const Scalar value = evaluate(r.state, grid.encode({n}));
    if (std::abs(value) > std::abs(peak)) peak = value;
  }
  const Scalar phase = peak == Scalar(0) ? Scalar(1) : std::abs(peak) / peak;
  Csv csv({"x", "psi"});
  for (std::uint64_t n : idx)
    csv.row({num(grid.coordinate(0, n)), num((phase * evaluate(r.state, grid.encode({n}))).real())});
  o.emit(csv, json{{"command", "schrodinger"}, {"bits", a.bits}, {"potential", a.potential}, {"energy", r.energy},
                   {"converged", r.converged}, {"max_bond", r.state.max_bond()}, {"seconds", seconds}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tnkit: tensor-train circuits, solvers, cross interpolation and quantics"};
  app.require_subcommand(1);
  std::map<CLI::App*, std::function<void()>> actions;
  Output out;

  GhzArgs ghz;
  auto* c_ghz = app.add_subcommand("ghz-bench", "Time GHZ-state construction per backend");
  c_ghz->add_option("--qubits,-n", ghz.max_qubits, "largest register")->check(CLI::PositiveNumber);
  c_ghz->add_option("--min-qubits", ghz.min_qubits, "smallest register");
  c_ghz->add_option("--stride", ghz.stride, "register size step")->check(CLI::PositiveNumber);
  c_ghz->add_option("--backend", ghz.backends, "mps, statevector, dense-matrix")
      ->delimiter(',')
      ->check(CLI::IsMember({"mps", "statevector", "dense-matrix"}));
  actions[c_ghz] = [&] { run_ghz_bench(ghz, out); };

  CircuitArgs circ;
  auto* c_run = app.add_subcommand("circuit-run", "Run a circuit file; list amplitudes or draw samples");
  c_run->add_option("file", circ.file, "circuit text file")->required()->check(CLI::ExistingFile);
  c_run->add_option("--backend", circ.backend)->check(CLI::IsMember({"mps", "statevector", "dense-matrix"}));
  c_run->add_option("--route", circ.route, "long-range gates: mpo or swap")->check(CLI::IsMember({"mpo", "swap"}));
  c_run->add_option("--chi", circ.chi, "bond cap for the mps backend (0: none)");
  c_run->add_option("--tol", circ.tol, "relative discarded weight per truncation")->check(CLI::NonNegativeNumber);
  c_run->add_option("--samples", circ.samples, "number of shots (0: list amplitudes)");
  c_run->add_option("--seed", circ.seed);
  c_run->add_flag("--cross-check", circ.cross_check, "compare with the statevector backend (N <= 10)");
  c_run->add_option("--trace", circ.trace, "per-gate fidelity CSV (mps backend)");
  actions[c_run] = [&] { run_circuit(circ, out); };

  FidelityArgs fid;
  auto* c_fid = app.add_subcommand("fidelity-sweep", "Fidelity versus depth for random circuits under TEBD");
  c_fid->add_option("--qubits,-n", fid.qubits);
  c_fid->add_option("--depth", fid.depth)->check(CLI::PositiveNumber);
  c_fid->add_option("--chi", fid.chis, "bond caps")->delimiter(',');
  c_fid->add_option("--seed", fid.seed);
  actions[c_fid] = [&] { run_fidelity_sweep(fid, out); };

  TfiArgs tfi;
  auto* c_tfi = app.add_subcommand("tfi", "Transverse-field Ising ground state by DMRG or imaginary TEBD");
  c_tfi->add_option("mode", tfi.mode, "dmrg or tebd-imag")->check(CLI::IsMember({"dmrg", "tebd-imag"}));
  c_tfi->add_option("--qubits,-n", tfi.model.spins);
  c_tfi->add_option("--J", tfi.model.j);
  c_tfi->add_option("--hz", tfi.model.hz);
  c_tfi->add_option("--hx", tfi.model.hx);
  c_tfi->add_option("--chi", tfi.chi)->check(CLI::PositiveNumber);
  c_tfi->add_option("--eta", tfi.eta, "imaginary time step")->check(CLI::PositiveNumber);
  c_tfi->add_option("--tau-max", tfi.tau_max)->check(CLI::NonNegativeNumber);
  c_tfi->add_option("--order", tfi.order, "Trotter order")->check(CLI::IsMember({1, 2}));
  c_tfi->add_option("--measure-every", tfi.measure_every, "steps between energy samples")->check(CLI::PositiveNumber);
  c_tfi->add_option("--sweeps", tfi.sweeps)->check(CLI::PositiveNumber);
  c_tfi->add_option("--seed", tfi.seed);
  actions[c_tfi] = [&] { run_tfi(tfi, out); };

  IntegrateArgs integ;
  auto* c_int = app.add_subcommand("integrate", "Cross-interpolated quadrature on a product grid");
  c_int->add_option("integrand", integ.integrand, "constant, gaussian or oscillatory");
  c_int->add_option("--dims", integ.dims)->check(CLI::PositiveNumber);
  c_int->add_option("--rule", integ.rule, "gk15, gk21, gk41, gk61 or trap:k");
  c_int->add_option("--lo", integ.lo);
  c_int->add_option("--hi", integ.hi);
  c_int->add_option("--tol", integ.tol)->check(CLI::NonNegativeNumber);
  c_int->add_option("--chi", integ.chi, "rank cap")->check(CLI::PositiveNumber);
  c_int->add_option("--sweeps", integ.sweeps)->check(CLI::PositiveNumber);
  c_int->add_option("--search", integ.search, "rook or full")->check(CLI::IsMember({"rook", "full"}));
  actions[c_int] = [&] { run_integrate(integ, out); };

  HeatArgs heat;
  auto* c_heat = app.add_subcommand("heat", "Periodic 1-D heat equation through the quantics Fourier transform");
  c_heat->add_option("--bits", heat.bits)->check(CLI::Range(1, 62));
  c_heat->add_option("--length,-L", heat.length, "domain [0, L)");
  c_heat->add_option("--times", heat.times)->delimiter(',');
  c_heat->add_option("--initial", heat.initial, "oscillating-step, gaussian or sine");
  c_heat->add_option("--chi", heat.chi)->check(CLI::PositiveNumber);
  c_heat->add_option("--tol", heat.tol, "cross interpolation tolerance")->check(CLI::NonNegativeNumber);
  c_heat->add_option("--stride", heat.stride, "grid points between CSV rows (0: auto)");
  actions[c_heat] = [&] { run_heat(heat, out); };

  PoissonArgs pois;
  auto* c_pois = app.add_subcommand("poisson", "Solve Lap u - rho u = n on a quantics grid");
  c_pois->add_option("--bits", pois.bits)->check(CLI::Range(1, 62));
  c_pois->add_option("--dims", pois.dims);
  c_pois->add_option("--ordering", pois.ordering)->check(CLI::IsMember({"serial", "interleaved", "mirror"}));
  c_pois->add_option("--lo", pois.lo);
  c_pois->add_option("--hi", pois.hi);
  c_pois->add_option("--source", pois.source, "gaussian or dipole");
  c_pois->add_option("--rho", pois.rho, "zero, constant or linear");
  c_pois->add_option("--rho-scale", pois.rho_scale);
  c_pois->add_option("--boundary", pois.boundary)->check(CLI::IsMember({"open", "periodic"}));
  c_pois->add_option("--chi", pois.chi)->check(CLI::PositiveNumber);
  c_pois->add_option("--tol", pois.tol)->check(CLI::NonNegativeNumber);
  c_pois->add_option("--stride", pois.stride, "grid points between CSV rows (0: auto)");
  actions[c_pois] = [&] { run_poisson(pois, out); };

  SchrodingerArgs sch;
  auto* c_sch = app.add_subcommand("schrodinger", "Ground state of -Lap + V on a quantics grid");
  c_sch->add_option("--bits", sch.bits)->check(CLI::Range(1, 62));
  c_sch->add_option("--lo", sch.lo);
  c_sch->add_option("--hi", sch.hi);
  c_sch->add_option("--potential", sch.potential, "harmonic, double-well or box");
  c_sch->add_option("--boundary", sch.boundary)->check(CLI::IsMember({"open", "periodic"}));
  c_sch->add_option("--chi", sch.chi)->check(CLI::PositiveNumber);
  c_sch->add_option("--sweeps", sch.sweeps)->check(CLI::PositiveNumber);
  c_sch->add_option("--stride", sch.stride, "grid points between CSV rows (0: auto)");
  actions[c_sch] = [&] { run_schrodinger(sch, out); };

  for (auto& [cmd, action] : actions) out.add_flags(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "tnkit: " << e.what() << '\n';
    return 2;
  }
  try {
    for (auto& [cmd, action] : actions)
      if (cmd->parsed()) action();
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "tnkit: error: " << msg << '\n';
    return 1;
  }
  return 0;
}
