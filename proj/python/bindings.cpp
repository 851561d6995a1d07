#include "tnkit/circuit.hpp"
#include "tnkit/io.hpp"
#include "tnkit/quantics.hpp"
#include "tnkit/simulate.hpp"
#include "tnkit/solvers.hpp"
#include "tnkit/tci.hpp"
#include "tnkit/tensor_train.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tnkit;

namespace {

using ComplexArray = py::array_t<Scalar, py::array::f_style | py::array::forcecast>;

py::array_t<Scalar> to_numpy(const DenseTensor& t) {
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  std::vector<py::ssize_t> strides(shape.size());
  py::ssize_t stride = sizeof(Scalar);
  for (std::size_t k = 0; k < shape.size(); ++k) {
    strides[k] = stride;
    stride *= shape[k];
  }
  return py::array_t<Scalar>(shape, strides, t.ptr());
}

DenseTensor from_numpy(const ComplexArray& a) {
  std::vector<Index> dims(a.shape(), a.shape() + a.ndim());
  return DenseTensor(dims, std::vector<Scalar>(a.data(), a.data() + a.size()));
}

TruncationSpec make_spec(std::optional<Index> max_rank, double tol) { return {max_rank, tol}; }

Boundary parse_boundary(const std::string& name) {
  if (name == "open") return Boundary::Open;
  if (name == "periodic") return Boundary::Periodic;
  throw py::value_error("boundary must be 'open' or 'periodic'");
}

LongRangeRoute parse_route(const std::string& name) {
  if (name == "mpo") return LongRangeRoute::Mpo;
  if (name == "swap") return LongRangeRoute::SwapNetwork;
  throw py::value_error("route must be 'mpo' or 'swap'");
}

TciOptions tci_options(double tol, Index max_rank, Index max_sweeps, const std::string& search, Index global_samples) {
  TciOptions o;
  o.tol = tol;
  o.max_rank = max_rank;
  o.max_sweeps = max_sweeps;
  o.global_samples = global_samples;
  if (search == "rook") o.search = PivotSearch::Rook;
  else if (search != "full") throw py::value_error("search must be 'full' or 'rook'");
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tensor-train toolkit: MPS/MPO algebra, circuits, solvers, cross interpolation and quantics grids";

  py::register_exception<OracleError>(m, "OracleError", PyExc_RuntimeError);
  py::register_exception<ZeroTensorError>(m, "ZeroTensorError", PyExc_ValueError);

  py::class_<TensorTrain>(m, "TensorTrain")
      .def(py::init([](const std::vector<ComplexArray>& cores) {
             std::vector<DenseTensor> c;
             for (const auto& a : cores) c.push_back(from_numpy(a));
             return TensorTrain(std::move(c));
           }),
           py::arg("cores"))
      .def_static(
          "from_dense",
          [](const ComplexArray& a, std::optional<Index> max_rank, double tol) {
            return from_dense(from_numpy(a), make_spec(max_rank, tol));
          },
          py::arg("array"), py::arg("max_rank") = py::none(), py::arg("tol") = 0.0)
      .def_static("constant", &TensorTrain::constant, py::arg("dims"), py::arg("value"))
      .def_static(
          "random",
          [](const std::vector<Index>& dims, Index chi, std::uint64_t seed) {
            RandomSource rng(seed);
            return TensorTrain::random(dims, chi, rng);
          },
          py::arg("dims"), py::arg("chi"), py::arg("seed") = 0)
      .def_static(
          "product_state",
          [](const std::vector<Index>& values, const std::vector<Index>& dims) {
            return TensorTrain::product_state(values, dims);
          },
          py::arg("values"), py::arg("dims"))
      .def("__len__", &TensorTrain::size)
      .def_property_readonly("physical_dims", &TensorTrain::physical_dims)
      .def_property_readonly("bond_dims", &TensorTrain::bond_dims)
      .def_property_readonly("max_bond", &TensorTrain::max_bond)
      .def_property_readonly("cores",
                             [](const TensorTrain& tt) {
                               py::list out;
                               for (const auto& c : tt.cores()) out.append(to_numpy(c));
                               return out;
                             })
      .def("to_dense", [](const TensorTrain& tt) { return to_numpy(to_dense(tt)); })
      .def("__call__", [](const TensorTrain& tt, const std::vector<Index>& idx) { return evaluate(tt, idx); })
      .def("norm", [](const TensorTrain& tt) { return norm(tt); })
      .def("save", [](const TensorTrain& tt, const std::string& path) { save_train(tt, path); })
      .def_static("load", &load_train)
      .def("__add__", [](const TensorTrain& a, const TensorTrain& b) { return add(a, b); })
      .def("__sub__", [](const TensorTrain& a, const TensorTrain& b) { return subtract(a, b); })
      .def("__mul__", [](const TensorTrain& a, Scalar s) { return scaled(a, s); })
      .def("__rmul__", [](const TensorTrain& a, Scalar s) { return scaled(a, s); })
      .def("__repr__", [](const TensorTrain& tt) {
        return "<TensorTrain sites=" + std::to_string(tt.size()) + " max_bond=" + std::to_string(tt.max_bond()) + ">";
      });

  py::class_<TensorTrainOperator>(m, "TensorTrainOperator")
      .def_static("identity", &TensorTrainOperator::identity, py::arg("dims"))
      .def_static(
          "from_dense",
          [](const Matrix& a, const std::vector<Index>& dims, std::optional<Index> max_rank, double tol) {
            return operator_from_dense(a, dims, make_spec(max_rank, tol));
          },
          py::arg("matrix"), py::arg("dims"), py::arg("max_rank") = py::none(), py::arg("tol") = 0.0)
      .def("__len__", &TensorTrainOperator::size)
      .def_property_readonly("bond_dims", &TensorTrainOperator::bond_dims)
      .def_property_readonly("max_bond", &TensorTrainOperator::max_bond)
      .def("to_dense", [](const TensorTrainOperator& op) { return to_dense(op); })
      .def("adjoint", [](const TensorTrainOperator& op) { return adjoint(op); });

  m.def("inner", &inner, py::arg("a"), py::arg("b"), "<a|b>");
  m.def("hadamard_product", &hadamard_product, py::arg("a"), py::arg("b"));
  m.def(
      "compress",
      [](const TensorTrain& tt, std::optional<Index> max_rank, double tol) {
        auto r = compress(tt, make_spec(max_rank, tol));
        return py::make_tuple(r.train, r.discarded_weight);
      },
      py::arg("train"), py::arg("max_rank") = py::none(), py::arg("tol") = 0.0,
      "Returns (train, relative discarded weight).");
  m.def(
      "apply",
      [](const TensorTrainOperator& op, const TensorTrain& v, std::optional<Index> max_rank, double tol) {
        return apply_zipup(op, v, make_spec(max_rank, tol)).train;
      },
      py::arg("op"), py::arg("train"), py::arg("max_rank") = py::none(), py::arg("tol") = 0.0);
  m.def(
      "sample",
      [](TensorTrain tt, Index shots, std::uint64_t seed) {
        normalize(tt);
        RandomSource rng(seed);
        return sample_many(tt, rng, shots);
      },
      py::arg("train"), py::arg("shots"), py::arg("seed") = 0);
  m.def("entanglement_entropy", &entanglement_entropy, py::arg("train"), py::arg("bond"));

  py::class_<QuantumCircuit>(m, "QuantumCircuit")
      .def_static("parse", [](const std::string& text) { return parse_circuit(text); })
      .def_static("load", &load_circuit)
      .def_static("ghz", &ghz_circuit, py::arg("qubits"))
      .def_static(
          "random",
          [](Index qubits, Index depth, std::uint64_t seed) {
            RandomSource rng(seed);
            return random_circuit(qubits, depth, rng);
          },
          py::arg("qubits"), py::arg("depth"), py::arg("seed") = 0)
      .def_property_readonly("qubits", &QuantumCircuit::qubits)
      .def_property_readonly("depth", &QuantumCircuit::depth)
      .def("__len__", &QuantumCircuit::size)
      .def("to_text", &QuantumCircuit::to_text);

  py::class_<TebdResult>(m, "TebdResult")
      .def_readonly("state", &TebdResult::state)
      .def_readonly("fidelity", &TebdResult::fidelity)
      .def_readonly("gate_fidelities", &TebdResult::gate_fidelities)
      .def_readonly("max_bond", &TebdResult::max_bond);

  m.def("run_statevector", &run_statevector, py::arg("circuit"));
  m.def(
      "run_tebd",
      [](const QuantumCircuit& c, std::optional<Index> max_rank, double tol, const std::string& route) {
        return run_tebd(c, make_spec(max_rank, tol), parse_route(route));
      },
      py::arg("circuit"), py::arg("max_rank") = py::none(), py::arg("tol") = 0.0, py::arg("route") = "mpo");

  py::class_<TfiModel>(m, "TfiModel")
      .def(py::init([](Index spins, double j, double hz, double hx) {
             TfiModel model{spins, j, hz, hx};
             model.validate();
             return model;
           }),
           py::arg("spins"), py::arg("j") = 1.0, py::arg("hz") = 0.0, py::arg("hx") = 1.0)
      .def_readonly("spins", &TfiModel::spins)
      .def_readonly("j", &TfiModel::j)
      .def_readonly("hz", &TfiModel::hz)
      .def_readonly("hx", &TfiModel::hx)
      .def("mpo", [](const TfiModel& model) { return tfi_mpo(model); });

  m.def(
      "dmrg_ground_state",
      [](const TfiModel& model, Index chi, Index sweeps, std::uint64_t seed) {
        RandomSource rng(seed);
        DmrgOptions o;
        o.chi_schedule = {chi};
        o.max_sweeps = sweeps;
        std::vector<Index> dims(model.spins, 2);
        auto r = dmrg_min_eig(tfi_mpo(model), TensorTrain::random(dims, 4, rng), o);
        return py::make_tuple(r.energy, r.state);
      },
      py::arg("model"), py::arg("chi") = 32, py::arg("sweeps") = 20, py::arg("seed") = 0,
      "Returns (energy, state).");
  m.def(
      "imaginary_tebd",
      [](const TfiModel& model, Index chi, double eta, double tau_max, int order) {
        ImaginaryTebdOptions o;
        o.spec = TruncationSpec::rank(chi);
        o.eta = eta;
        o.tau_max = tau_max;
        o.order = order;
        auto r = imaginary_tebd_ground_state(model, o);
        return py::make_tuple(r.energy, r.state);
      },
      py::arg("model"), py::arg("chi") = 40, py::arg("eta") = 0.1, py::arg("tau_max") = 10.0, py::arg("order") = 2,
      "Returns (energy, state).");

  m.def(
      "tci",
      [](const std::function<Scalar(const std::vector<Index>&)>& f, const std::vector<Index>& extents, double tol,
         Index max_rank, Index max_sweeps, const std::string& search, Index global_samples) {
        auto state = tci_build(f, extents, tci_options(tol, max_rank, max_sweeps, search, global_samples));
        return py::make_tuple(state.to_tt(), state.converged(), state.oracle_calls());
      },
      py::arg("f"), py::arg("extents"), py::arg("tol") = 1e-10, py::arg("max_rank") = 64,
      py::arg("max_sweeps") = 20, py::arg("search") = "full", py::arg("global_samples") = 0,
      "Cross interpolation of f(index list); returns (train, converged, oracle calls).");

  py::class_<IntegrationResult>(m, "IntegrationResult")
      .def_readonly("value", &IntegrationResult::value)
      .def_readonly("evaluations", &IntegrationResult::evaluations)
      .def_readonly("max_rank", &IntegrationResult::max_rank)
      .def_readonly("converged", &IntegrationResult::converged)
      .def_readonly("trace", &IntegrationResult::trace);

  m.def(
      "integrate",
      [](const std::function<Scalar(const std::vector<double>&)>& f, Index dims, double lo, double hi,
         const std::string& rule, double tol, Index max_rank, Index max_sweeps, const std::string& search) {
        return integrate(f, dims, lo, hi, quadrature_rule(rule), tci_options(tol, max_rank, max_sweeps, search, 0));
      },
      py::arg("f"), py::arg("dims"), py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("rule") = "gk41",
      py::arg("tol") = 1e-12, py::arg("max_rank") = 200, py::arg("max_sweeps") = 60, py::arg("search") = "rook");

  py::class_<QuanticsGrid>(m, "QuanticsGrid")
      .def_static("line", &QuanticsGrid::line, py::arg("bits"), py::arg("lo") = 0.0, py::arg("hi") = 1.0)
      .def_static(
          "box",
          [](Index bits, Index dims, double lo, double hi, const std::string& ordering) {
            return QuanticsGrid::box(bits, dims, lo, hi, parse_ordering(ordering));
          },
          py::arg("bits"), py::arg("dims"), py::arg("lo") = 0.0, py::arg("hi") = 1.0,
          py::arg("ordering") = "interleaved")
      .def_readonly("bits", &QuanticsGrid::bits)
      .def_readonly("dims", &QuanticsGrid::dims)
      .def_property_readonly("sites", &QuanticsGrid::sites)
      .def_property_readonly("points", &QuanticsGrid::points)
      .def("coordinate", &QuanticsGrid::coordinate, py::arg("dim"), py::arg("n"))
      .def("encode", &QuanticsGrid::encode, py::arg("n"))
      .def("decode", [](const QuanticsGrid& g, const std::vector<Index>& sigma) { return g.decode(sigma); });

  m.def(
      "quantics_tci",
      [](const GridFunction& f, const QuanticsGrid& grid, Index max_rank) {
        auto fit = quantics_tci(f, grid, quantics_tci_options(max_rank));
        return py::make_tuple(fit.train, fit.converged);
      },
      py::arg("f"), py::arg("grid"), py::arg("max_rank") = 64, "Returns (train, converged).");
  m.def("qft_mpo", &qft_mpo, py::arg("bits"), py::arg("chi") = 15);
  m.def("laplacian_mpo", [](const QuanticsGrid& g, const std::string& b) { return laplacian_mpo(g, parse_boundary(b)); },
        py::arg("grid"), py::arg("boundary") = "periodic");
  m.def(
      "heat_solve",
      [](const GridFunction& u0, double t, const QuanticsGrid& grid) { return heat_solve(u0, t, grid).solution; },
      py::arg("u0"), py::arg("t"), py::arg("grid"));
  m.def(
      "poisson_solve",
      [](const GridFunction& source, const GridFunction& rho, const QuanticsGrid& grid, const std::string& boundary) {
        PoissonOptions o;
        o.boundary = parse_boundary(boundary);
        auto r = poisson_solve(source, rho, grid, o);
        return py::make_tuple(r.solution, r.residual);
      },
      py::arg("source"), py::arg("rho"), py::arg("grid"), py::arg("boundary") = "open",
      "Solves Lap U - rho U = source; returns (solution, relative residual).");
  m.def(
      "schrodinger_ground_state",
      [](const GridFunction& potential, const QuanticsGrid& grid, const std::string& boundary) {
        auto r = schrodinger_ground_state(potential, grid, parse_boundary(boundary));
        return py::make_tuple(r.energy, r.state);
      },
      py::arg("potential"), py::arg("grid"), py::arg("boundary") = "open", "Returns (energy, state).");
}
