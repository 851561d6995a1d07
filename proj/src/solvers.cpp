#include "tnkit/solvers.hpp"

#include "environment.hpp"
#include "tnkit/simulate.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace tnkit {

namespace {

Vector to_vector(const DenseTensor& t) { return Eigen::Map<const Vector>(t.ptr(), static_cast<Eigen::Index>(t.size())); }

DenseTensor from_vector(const Vector& v, std::vector<Index> dims) {
  return DenseTensor(std::move(dims), std::vector<Scalar>(v.data(), v.data() + v.size()));
}

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Index schedule_at(const std::vector<Index>& schedule, Index sweep) {
  if (schedule.empty()) throw std::invalid_argument("dmrg: empty bond schedule");
  return schedule[std::min<Index>(sweep, schedule.size() - 1)];
}

}  // namespace

// ------------------------------------------------------------ model

void TfiModel::validate() const {
  if (spins < 2) throw std::invalid_argument("TFI model needs at least two spins");
  if (!std::isfinite(j) || !std::isfinite(hz) || !std::isfinite(hx))
    throw std::invalid_argument("TFI model parameters must be finite");
}

TensorTrainOperator tfi_mpo(const TfiModel& m) {
  m.validate();
  const Matrix id = Matrix::Identity(2, 2), z = pauli_z();
  const Matrix local = -m.hz * pauli_z() - m.hx * pauli_x();
  // Bond channels: 0 = finished sum, 1 = pending Z, 2 = nothing placed yet.
  DenseTensor bulk({3, 2, 2, 3});
  auto put = [&](DenseTensor& w, Index l, Index r, const Matrix& op) {
    for (Index o = 0; o < 2; ++o)
      for (Index i = 0; i < 2; ++i) w({l, o, i, r}) += op(o, i);
  };
  put(bulk, 0, 0, id);
  put(bulk, 1, 0, z);
  put(bulk, 2, 0, local);
  put(bulk, 2, 1, m.j * z);
  put(bulk, 2, 2, id);
  std::vector<DenseTensor> cores;
  for (Index k = 0; k < m.spins; ++k) {
    const Index l0 = k == 0 ? 2 : 0, l1 = 3;
    const Index r1 = k + 1 == m.spins ? 1 : 3;
    DenseTensor w({l1 - l0, 2, 2, r1});
    for (Index l = l0; l < l1; ++l)
      for (Index r = 0; r < r1; ++r)
        for (Index o = 0; o < 2; ++o)
          for (Index i = 0; i < 2; ++i) w({l - l0, o, i, r}) = bulk({l, o, i, r});
    cores.push_back(std::move(w));
  }
  return TensorTrainOperator(std::move(cores));
}

// ------------------------------------------------------------ Lanczos

EigenPair lowest_eigenpair(const std::function<Vector(const Vector&)>& apply, const Vector& start, double tol,
                           Index krylov, Index restarts) {
  const Eigen::Index n = start.size();
  if (n == 0) throw std::invalid_argument("lowest_eigenpair: empty start vector");
  Vector v = start;
  if (!(v.norm() > 0.0)) v = Vector::Ones(n);
  v.normalize();
  const Eigen::Index m_max = std::min<Eigen::Index>(static_cast<Eigen::Index>(krylov), n);
  EigenPair out;
  for (Index attempt = 0; attempt <= restarts; ++attempt) {
    Matrix basis(n, m_max);
    std::vector<double> alpha, beta;
    basis.col(0) = v;
    Eigen::Index m = 0;
    double last_beta = 0.0;
    for (Eigen::Index j = 0; j < m_max; ++j) {
      Vector w = apply(basis.col(j));
      alpha.push_back(basis.col(j).dot(w).real());
      for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
      last_beta = w.norm();
      m = j + 1;
      if (j + 1 == m_max || last_beta < 1e-14 * std::max(1.0, std::abs(alpha.back()))) break;
      beta.push_back(last_beta);
      basis.col(j + 1) = w / last_beta;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 0; k < m; ++k) t(k, k) = alpha[k];
    for (Eigen::Index k = 0; k + 1 < m; ++k) t(k, k + 1) = t(k + 1, k) = beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd s = es.eigenvectors().col(0);
    out.value = es.eigenvalues()(0);
    out.vector = basis.leftCols(m) * s.cast<Scalar>();
    out.vector.normalize();
    const double residual = std::abs(last_beta * s(m - 1));
    if (residual < tol * std::max(1.0, std::abs(out.value)) || m == n) {
      out.converged = true;
      return out;
    }
    v = out.vector;
  }
  return out;
}

// ------------------------------------------------------------ DMRG

namespace {

EigenPair local_ground_state(const std::function<Vector(const Vector&)>& apply, const std::function<Matrix()>& dense,
                             const Vector& start, Index dense_limit) {
  if (static_cast<Index>(start.size()) < dense_limit) {
    Matrix h = dense();
    h = (0.5 * (h + h.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    return {es.eigenvalues()(0), es.eigenvectors().col(0), true};
  }
  return lowest_eigenpair(apply, start, 1e-10);
}

}  // namespace

DmrgResult dmrg_min_eig(const TensorTrainOperator& op, const TensorTrain& guess, const DmrgOptions& options) {
  const Index n = guess.size();
  if (op.size() != n) throw std::invalid_argument("dmrg: operator and state sizes differ");
  for (Index k = 0; k < n; ++k)
    if (op.in_dim(k) != guess.physical_dim(k) || op.out_dim(k) != guess.physical_dim(k))
      throw std::invalid_argument("dmrg: physical extent mismatch at site " + std::to_string(k));

  DmrgResult res;
  TensorTrain psi = guess;
  canonicalize(psi, 0);
  normalize(psi);
  auto& c = psi.cores();
  std::vector<DenseTensor> left(n + 1), right(n + 1);
  left[0] = env::trivial();
  right[n] = env::trivial();
  for (Index k = n - 1; k >= 1; --k) right[k] = env::extend_right(right[k + 1], c[k], op.core(k), c[k]);

  const bool two_site = options.mode == SweepMode::TwoSite && n > 1;
  double energy = 0.0;

  auto solve1 = [&](Index k) {
    const DenseTensor& l = left[k];
    const DenseTensor& r = right[k + 1];
    const DenseTensor& w = op.core(k);
    const std::vector<Index> dims = c[k].dims();
    EigenPair ep = local_ground_state([&](const Vector& x) { return to_vector(env::apply1(l, w, r, from_vector(x, dims))); },
                                      [&] { return env::dense1(l, w, r); }, to_vector(c[k]), options.dense_limit);
    if (!ep.converged) ++res.report.local_solver_warnings;
    c[k] = from_vector(ep.vector, dims);
    energy = ep.value;
  };

  auto solve2 = [&](Index k) {
    const DenseTensor& l = left[k];
    const DenseTensor& r = right[k + 2];
    const DenseTensor& w1 = op.core(k);
    const DenseTensor& w2 = op.core(k + 1);
    DenseTensor theta = contract(c[k], c[k + 1], {{2, 0}});
    const std::vector<Index> dims = theta.dims();
    EigenPair ep = local_ground_state(
        [&](const Vector& x) { return to_vector(env::apply2(l, w1, w2, r, from_vector(x, dims))); },
        [&] { return env::dense2(l, w1, w2, r); }, to_vector(theta), options.dense_limit);
    if (!ep.converged) ++res.report.local_solver_warnings;
    energy = ep.value;
    return from_vector(ep.vector, dims);
  };

  double previous = 0.0;
  for (Index sweep = 0; sweep < options.max_sweeps; ++sweep) {
    const auto t0 = std::chrono::steady_clock::now();
    const Index chi = schedule_at(options.chi_schedule, sweep);
    const TruncationSpec spec = TruncationSpec::both(chi, options.svd_tol);
    if (two_site) {
      for (Index k = 0; k + 1 < n; ++k) {
        Factorization f = svd_truncate(solve2(k), 2, spec, Absorb::Right, 1);
        c[k] = std::move(f.left);
        c[k + 1] = std::move(f.right);
        left[k + 1] = env::extend_left(left[k], c[k], op.core(k), c[k]);
      }
      for (Index k = n - 1; k-- > 0;) {
        Factorization f = svd_truncate(solve2(k), 2, spec, Absorb::Left, 1);
        c[k] = std::move(f.left);
        c[k + 1] = std::move(f.right);
        right[k + 1] = env::extend_right(right[k + 2], c[k + 1], op.core(k + 1), c[k + 1]);
      }
    } else {
      for (Index k = 0; k + 1 < n; ++k) {
        solve1(k);
        const Index target = std::min(c[k].dim(0) * c[k].dim(1), chi);
        Factorization f = qr_factor_enriched(c[k], 2, target);
        c[k] = std::move(f.left);
        c[k + 1] = contract(f.right, c[k + 1], {{1, 0}});
        left[k + 1] = env::extend_left(left[k], c[k], op.core(k), c[k]);
      }
      for (Index k = n - 1; k > 0; --k) {
        solve1(k);
        const Index target = std::min(c[k].dim(1) * c[k].dim(2), chi);
        // LQ through a QR of the (d, r, l) transpose.
        Factorization f = qr_factor_enriched(permute(c[k], {1, 2, 0}), 2, target);
        c[k] = permute(f.left, {2, 0, 1});
        c[k - 1] = contract(c[k - 1], f.right, {{2, 1}});
        right[k] = env::extend_right(right[k + 1], c[k], op.core(k), c[k]);
      }
      solve1(0);
    }
    psi.set_center(0);
    res.report.values.push_back(energy);
    res.report.max_bonds.push_back(psi.max_bond());
    res.report.seconds.push_back(seconds_since(t0));
    const bool schedule_done = sweep + 1 >= options.chi_schedule.size();
    if (sweep > 0 && schedule_done && std::abs(energy - previous) < options.energy_tol) {
      res.converged = true;
      break;
    }
    previous = energy;
  }
  normalize(psi);
  res.energy = energy;
  res.state = std::move(psi);
  return res;
}

// ------------------------------------------------------------ ALS

double relative_residual(const TensorTrainOperator& a, const TensorTrain& x, const TensorTrain& b) {
  TensorTrain diff = subtract(apply_zipup(a, x, TruncationSpec::exact()).train, b);
  canonicalize(diff, 0);
  TensorTrain bc = b;
  canonicalize(bc, 0);
  const double bn = bc.core(0).norm();
  if (bn == 0.0) throw std::invalid_argument("relative_residual: right-hand side is zero");
  return diff.core(0).norm() / bn;
}

namespace {

Vector conjugate_gradient(const std::function<Vector(const Vector&)>& apply, const Vector& rhs, Vector x,
                          double tol, Index max_iter) {
  Vector r = rhs - apply(x);
  Vector p = r;
  double rr = r.squaredNorm();
  const double stop = tol * tol * rhs.squaredNorm();
  for (Index it = 0; it < max_iter && rr > stop; ++it) {
    Vector ap = apply(p);
    const Scalar alpha = rr / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return x;
}

std::vector<DenseTensor> identity_cores(const TensorTrain& t) {
  std::vector<DenseTensor> out;
  for (Index k = 0; k < t.size(); ++k) out.push_back(env::identity_core(t.physical_dim(k)));
  return out;
}

}  // namespace

AlsResult als_linear_solve(const TensorTrainOperator& a_in, const TensorTrain& b_in, const TensorTrain& guess,
                           const AlsOptions& options) {
  const Index n = b_in.size();
  if (a_in.size() != n || guess.size() != n) throw std::invalid_argument("als: site count mismatch");
  TensorTrainOperator a = a_in;
  TensorTrain b = b_in;
  if (options.normal_equations) {
    TensorTrainOperator ad = adjoint(a_in);
    a = op_product(ad, a_in, TruncationSpec::tolerance(1e-28));
    b = compress(apply_zipup(ad, b_in, TruncationSpec::exact()).train, TruncationSpec::tolerance(1e-28)).train;
  }
  AlsResult res;
  TensorTrain x = guess;
  canonicalize(x, 0);
  auto& c = x.cores();
  const std::vector<DenseTensor> ids = identity_cores(b);
  std::vector<DenseTensor> la(n + 1), ra(n + 1), lb(n + 1), rb(n + 1);
  la[0] = lb[0] = env::trivial();
  ra[n] = rb[n] = env::trivial();
  for (Index k = n - 1; k >= 1; --k) {
    ra[k] = env::extend_right(ra[k + 1], c[k], a.core(k), c[k]);
    rb[k] = env::extend_right(rb[k + 1], c[k], ids[k], b.core(k));
  }
  const TruncationSpec spec = TruncationSpec::both(options.max_rank, options.svd_tol);

  auto local_solve = [&](Index k) {
    DenseTensor bb = contract(b.core(k), b.core(k + 1), {{2, 0}});
    Vector rhs = to_vector(env::apply2(lb[k], ids[k], ids[k + 1], rb[k + 2], bb));
    DenseTensor theta = contract(c[k], c[k + 1], {{2, 0}});
    const std::vector<Index> dims = theta.dims();
    Vector sol;
    if (static_cast<Index>(rhs.size()) <= options.dense_limit || n == 2) {
      Matrix m = env::dense2(la[k], a.core(k), a.core(k + 1), ra[k + 2]);
      sol = m.partialPivLu().solve(rhs);
    } else {
      auto apply = [&](const Vector& v) {
        return to_vector(env::apply2(la[k], a.core(k), a.core(k + 1), ra[k + 2], from_vector(v, dims)));
      };
      sol = conjugate_gradient(apply, rhs, to_vector(theta), 1e-12, 20 * rhs.size());
    }
    return from_vector(sol, dims);
  };

  for (Index sweep = 0; sweep < options.sweeps && n > 1; ++sweep) {
    const auto t0 = std::chrono::steady_clock::now();
    for (Index k = 0; k + 1 < n; ++k) {
      Factorization f = svd_truncate(local_solve(k), 2, spec, Absorb::Right, 1);
      c[k] = std::move(f.left);
      c[k + 1] = std::move(f.right);
      la[k + 1] = env::extend_left(la[k], c[k], a.core(k), c[k]);
      lb[k + 1] = env::extend_left(lb[k], c[k], ids[k], b.core(k));
    }
    for (Index k = n - 1; k-- > 0;) {
      Factorization f = svd_truncate(local_solve(k), 2, spec, Absorb::Left, 1);
      c[k] = std::move(f.left);
      c[k + 1] = std::move(f.right);
      ra[k + 1] = env::extend_right(ra[k + 2], c[k + 1], a.core(k + 1), c[k + 1]);
      rb[k + 1] = env::extend_right(rb[k + 2], c[k + 1], ids[k + 1], b.core(k + 1));
    }
    x.set_center(0);
    res.report.values.push_back(relative_residual(a_in, x, b_in));
    res.report.max_bonds.push_back(x.max_bond());
    res.report.seconds.push_back(seconds_since(t0));
    if (res.report.values.back() < options.residual_tol) break;
  }
  if (n == 1) {
    Matrix m = to_dense(a);
    Vector sol = m.partialPivLu().solve(to_vector(b.core(0)));
    c[0] = from_vector(sol, {1, b.physical_dim(0), 1});
    res.report.values.push_back(relative_residual(a_in, x, b_in));
    res.report.max_bonds.push_back(1);
    res.report.seconds.push_back(0.0);
  }
  res.solution = std::move(x);
  return res;
}

// ------------------------------------------------------------ Trotter

QuantumCircuit trotter_layers(const TfiModel& m, double eta, bool imaginary, int order) {
  m.validate();
  if (!(eta > 0.0)) throw std::invalid_argument("trotter step must be positive");
  if (order != 1 && order != 2) throw std::invalid_argument("trotter order must be 1 or 2");
  // exp(c * x) with c = -i t for real time and -t for imaginary time.
  auto factor = [&](double t, double x) {
    return imaginary ? std::exp(Scalar(-t * x)) : std::exp(Scalar(0.0, -t * x));
  };
  const bool unitary = !imaginary;
  const Matrix had = Gate::h(0).matrix;

  auto z_field = [&](double t) {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = factor(t, -m.hz);
    u(1, 1) = factor(t, m.hz);
    return u;
  };
  auto x_field = [&](double t) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = factor(t, -m.hx);
    d(1, 1) = factor(t, m.hx);
    Matrix u = had * d * had;
    return u;
  };
  Matrix zz = Matrix::Zero(4, 4);
  for (Index s = 0; s < 4; ++s) zz(s, s) = factor(eta, (s == 0 || s == 3) ? m.j : -m.j);

  QuantumCircuit c(m.spins);
  const double x_step = order == 2 ? eta / 2 : eta;
  auto add_x = [&] {
    const Matrix ux = x_field(x_step);
    for (Index q = 0; q < m.spins; ++q) c.add(Gate::single(ux, q, unitary));
  };
  add_x();
  for (Index parity = 0; parity < 2; ++parity)
    for (Index q = parity; q + 1 < m.spins; q += 2) c.add(Gate::two(zz, q, q + 1, unitary));
  const Matrix uz = z_field(eta);
  for (Index q = 0; q < m.spins; ++q) c.add(Gate::single(uz, q, unitary));
  if (order == 2) add_x();
  return c;
}

ImaginaryTebdResult imaginary_tebd_ground_state(const TfiModel& m, const ImaginaryTebdOptions& options) {
  m.validate();
  if (!(options.tau_max >= 0.0)) throw std::invalid_argument("imaginary time must be non-negative");
  const QuantumCircuit step = trotter_layers(m, options.eta, true, options.order);
  const TensorTrainOperator h = tfi_mpo(m);
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  ImaginaryTebdResult res;
  res.state = TensorTrain::product_state(std::vector<Vector>(m.spins, plus));
  canonicalize(res.state, 0);
  const Index steps = static_cast<Index>(std::llround(options.tau_max / options.eta));
  const Index every = std::max<Index>(1, options.measure_every);
  GateApplyOptions opt{options.spec, LongRangeRoute::Mpo, true};
  auto measure = [&](Index s) {
    res.times.push_back(s * options.eta);
    res.energies.push_back(expectation(h, res.state).real());
    res.max_bonds.push_back(res.state.max_bond());
  };
  measure(0);
  for (Index s = 1; s <= steps; ++s) {
    for (const auto& g : step.gates()) apply_gate(res.state, g, opt);
    if (s % every == 0 || s == steps) measure(s);
  }
  res.energy = res.energies.back();
  return res;
}

}  // namespace tnkit
