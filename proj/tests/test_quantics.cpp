#include "dense_oracles.hpp"
#include "tnkit/quantics.hpp"

#include <Eigen/Sparse>
#include <gtest/gtest.h>
#include <unsupported/Eigen/FFT>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

using namespace tnkit;
using oracle::flat;
using std::numbers::pi;

namespace {

Vector dense_of(const TensorTrain& tt) { return flat(to_dense(tt)); }

// Flat index of a grid point in the site-0-fastest dense convention.
Index flat_index(const QuanticsGrid& g, const std::vector<std::uint64_t>& n) {
  const auto sigma = g.encode(n);
  Index f = 0;
  for (Index s = 0; s < sigma.size(); ++s) f |= sigma[s] << s;
  return f;
}

Index reverse_bits(Index x, Index bits) {
  Index r = 0;
  for (Index k = 0; k < bits; ++k) r |= ((x >> k) & 1u) << (bits - 1 - k);
  return r;
}

Matrix dft(Index bits) {
  const Index m = Index{1} << bits;
  Matrix f(m, m);
  for (Index w = 0; w < m; ++w)
    for (Index t = 0; t < m; ++t) f(w, t) = std::polar(1.0 / std::sqrt(double(m)), -2 * pi * double((w * t) % m) / m);
  return f;
}

// 1-D second-difference stencil on 2^bits points scaled by 1/h^2.
Matrix stencil(Index bits, double h, bool periodic) {
  const Index m = Index{1} << bits;
  Matrix l = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    l(i, i) = -2.0;
    if (i + 1 < m) l(i, i + 1) = 1.0;
    if (i > 0) l(i, i - 1) = 1.0;
  }
  if (periodic) l(0, m - 1) = l(m - 1, 0) = 1.0;
  return l / (h * h);
}

Vector samples(const QuanticsGrid& g, const std::function<Scalar(double)>& f) {
  Vector v(g.points());
  for (std::uint64_t n = 0; n < g.points(); ++n) v(n) = f(g.coordinate(0, n));
  return v;
}

double max_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Quantics, BitEncodingRoundTrip) {
  EXPECT_EQ(encode_bits(0, 4), (std::vector<Index>{0, 0, 0, 0}));
  EXPECT_EQ(encode_bits(5, 3), (std::vector<Index>{1, 0, 1}));
  for (std::uint64_t n = 0; n < 1024; ++n) EXPECT_EQ(decode_bits(encode_bits(n, 10)), n);
  EXPECT_THROW(encode_bits(8, 3), std::invalid_argument);
}

TEST(Quantics, OrderingsAreBijections) {
  for (auto ord : {QuanticsOrdering::Serial, QuanticsOrdering::Interleaved, QuanticsOrdering::Mirror}) {
    const auto g = QuanticsGrid::box(4, 2, 0.0, 1.0, ord);
    std::vector<int> seen(g.sites(), 0);
    for (Index d = 0; d < 2; ++d)
      for (Index a = 0; a < 4; ++a) {
        const Index s = g.site_of(d, a);
        ++seen[s];
        EXPECT_EQ(g.site_role(s), std::make_pair(d, a));
      }
    for (int c : seen) EXPECT_EQ(c, 1);
    for (std::uint64_t x = 0; x < 16; x += 3)
      for (std::uint64_t y = 0; y < 16; y += 5) {
        EXPECT_EQ(g.decode(g.encode({x, y})), (std::vector<std::uint64_t>{x, y}));
      }
  }
  EXPECT_THROW(QuanticsGrid::box(3, 3, 0.0, 1.0, QuanticsOrdering::Mirror), std::invalid_argument);
  EXPECT_THROW(parse_ordering("diagonal"), std::invalid_argument);
}

TEST(Quantics, ExponentialIsRankOne) {
  const auto g = QuanticsGrid::line(20, -1.0, 3.0);
  const auto ones = exp_mps(g, 0.0);
  EXPECT_EQ(ones.max_bond(), 1u);
  EXPECT_NEAR(std::abs(evaluate(ones, g.encode({12345}))), 1.0, 1e-15);

  const Scalar a(0.7, -2.3);
  const auto tt = exp_mps(g, a);
  EXPECT_EQ(tt.max_bond(), 1u);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t n = rng() % g.points();
    const Scalar exact = std::exp(a * g.coordinate(0, n));
    EXPECT_LT(std::abs(evaluate(tt, g.encode({n})) - exact), 1e-12 * std::max(1.0, std::abs(exact)));
  }
}

TEST(Quantics, CosineSumsCompressToRankFour) {
  const auto g = QuanticsGrid::line(30, 0.0, 1.0);
  const auto c = cos_mps(g, 3.0);
  EXPECT_EQ(c.max_bond(), 2u);
  const double k1 = 2.0, k2 = 2000.0;
  const auto sum = compress(add(cos_mps(g, k1), cos_mps(g, k2)), TruncationSpec::tolerance(1e-24)).train;
  EXPECT_EQ(sum.max_bond(), 4u);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t n = rng() % g.points();
    const double x = g.coordinate(0, n);
    EXPECT_NEAR(std::abs(evaluate(sum, g.encode({n})) - (std::cos(k1 * x) + std::cos(k2 * x))), 0.0, 1e-10);
  }
}

TEST(Quantics, DeltaTrainIsRankOne) {
  const auto g = QuanticsGrid::line(16, 0.0, 1.0);
  const auto delta = TensorTrain::product_state(g.encode({40503}), std::vector<Index>(16, 2));
  EXPECT_EQ(delta.max_bond(), 1u);
  EXPECT_EQ(evaluate(delta, g.encode({40503})), Scalar(1.0));
  EXPECT_EQ(evaluate(delta, g.encode({40502})), Scalar(0.0));
}

TEST(Quantics, PolynomialRanks) {
  const auto g = QuanticsGrid::line(12, 0.0, 1.0);
  EXPECT_EQ(poly_mps(g, {2.5}).max_bond(), 1u);
  for (Index deg = 1; deg <= 6; ++deg) {
    std::vector<Scalar> c(deg + 1, 0.0);
    c[deg] = 1.0;
    const auto tt = poly_mps(g, c);
    for (Index b : tt.bond_dims()) EXPECT_EQ(b, deg + 1);
    EXPECT_EQ(compress(tt, TruncationSpec::exact()).train.max_bond(), deg + 1) << "x^" << deg;
  }
}

TEST(Quantics, PolynomialValuesOnShiftedDomain) {
  const auto g = QuanticsGrid::line(12, -1.5, 2.0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Scalar> c(5);
  for (auto& x : c) x = u(rng);
  const auto tt = poly_mps(g, c);
  EXPECT_EQ(tt.max_bond(), 5u);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t n = rng() % g.points();
    const double x = g.coordinate(0, n);
    Scalar p = 0.0;
    for (Index q = c.size(); q-- > 0;) p = p * x + c[q];
    EXPECT_LT(std::abs(evaluate(tt, g.encode({n})) - p), 1e-11);
  }
}

TEST(Quantics, OrderingsAgreePointwise) {
  auto f = [](const std::vector<double>& x) { return Scalar(std::exp(-x[0] * x[1]) * std::sin(3 * x[0] + x[1])); };
  std::vector<TensorTrain> trains;
  std::vector<QuanticsGrid> grids;
  for (auto ord : {QuanticsOrdering::Serial, QuanticsOrdering::Interleaved, QuanticsOrdering::Mirror}) {
    grids.push_back(QuanticsGrid::box(5, 2, 0.0, 2.0, ord));
    auto fit = quantics_tci(f, grids.back(), {.tol = 1e-14, .max_rank = 64, .max_sweeps = 40, .initial = {}});
    EXPECT_TRUE(fit.converged);
    trains.push_back(fit.train);
  }
  for (std::uint64_t x = 0; x < 32; ++x)
    for (std::uint64_t y = 0; y < 32; ++y) {
      const Scalar exact = f({grids[0].coordinate(0, x), grids[0].coordinate(1, y)});
      for (Index k = 0; k < 3; ++k) EXPECT_LT(std::abs(evaluate(trains[k], grids[k].encode({x, y})) - exact), 1e-10);
    }
}

TEST(Quantics, AdderMatchesDensePermutation) {
  const Index bits = 4, m = Index{1} << bits;
  const auto g = QuanticsGrid::box(bits, 2, 0.0, 1.0, QuanticsOrdering::Interleaved);
  for (bool modulo : {false, true}) {
    const Matrix theta = to_dense(adder_mpo(g, modulo));
    Matrix expect = Matrix::Zero(m * m, m * m);
    for (std::uint64_t np = 0; np < m; ++np)
      for (std::uint64_t mp = 0; mp < m; ++mp) {
        std::uint64_t sum = np + mp;
        if (sum >= m && !modulo) continue;
        sum %= m;
        expect(flat_index(g, {np, sum}), flat_index(g, {np, mp})) = 1.0;
      }
    EXPECT_LT((theta - expect).cwiseAbs().maxCoeff(), 1e-12) << "modulo " << modulo;
  }
}

TEST(Quantics, AdderChangesVariables) {
  const Index bits = 4, m = Index{1} << bits;
  const auto g = QuanticsGrid::box(bits, 2, 0.0, 1.0, QuanticsOrdering::Interleaved);
  RandomSource rng(14);
  const auto psi = TensorTrain::random(std::vector<Index>(2 * bits, 2), 3, rng);
  const auto theta = adder_mpo(g, false);
  const Vector forward = dense_of(apply_zipup(theta, psi, TruncationSpec::exact()).train);
  const Vector backward = dense_of(apply_zipup(adjoint(theta), psi, TruncationSpec::exact()).train);
  const Vector v = dense_of(psi);
  for (std::uint64_t n = 0; n < m; ++n)
    for (std::uint64_t k = 0; k < m; ++k) {
      const Scalar fwd = k >= n ? v(flat_index(g, {n, k - n})) : Scalar(0.0);
      const Scalar bwd = k + n < m ? v(flat_index(g, {n, k + n})) : Scalar(0.0);
      EXPECT_LT(std::abs(forward(flat_index(g, {n, k})) - fwd), 1e-12);
      EXPECT_LT(std::abs(backward(flat_index(g, {n, k})) - bwd), 1e-12);
    }
}

TEST(Quantics, ShiftActsOnDeltas) {
  const Index bits = 5, m = Index{1} << bits;
  const auto g = QuanticsGrid::line(bits, 0.0, 1.0);
  const Matrix id = Matrix::Identity(m, m);
  EXPECT_LT((to_dense(shift_mpo(g, 0, false)) - id).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((to_dense(shift_mpo(g, 0, true)) - id).cwiseAbs().maxCoeff(), 1e-14);
  for (std::int64_t s : {1, 3, 7, -1, -5, 31, -31, 45}) {
    const Matrix t = to_dense(shift_mpo(g, s, true));
    for (Index k = 0; k < m; ++k) {
      Vector delta = Vector::Zero(m);
      delta(k) = 1.0;
      const Index target = ((static_cast<std::int64_t>(k) - s) % std::int64_t(m) + m) % m;
      Vector expect = Vector::Zero(m);
      expect(target) = 1.0;
      EXPECT_LT(max_diff(t * delta, expect), 1e-13) << "s=" << s << " k=" << k;
    }
    const Matrix back = to_dense(shift_mpo(g, -s, true));
    EXPECT_LT((t * back - id).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Quantics, OpenShiftDropsOutsidePoints) {
  const Index bits = 5, m = Index{1} << bits;
  const auto g = QuanticsGrid::line(bits, 0.0, 1.0);
  for (std::int64_t s : {1, 6, -1, -9}) {
    const Matrix t = to_dense(shift_mpo(g, s, false));
    Matrix expect = Matrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
      const std::int64_t j = std::int64_t(i) + s;
      if (j >= 0 && j < std::int64_t(m)) expect(i, j) = 1.0;
    }
    EXPECT_LT((t - expect).cwiseAbs().maxCoeff(), 1e-14) << s;
  }
  EXPECT_THROW(shift_mpo(g, 32, false), std::invalid_argument);
}

TEST(Quantics, ShiftAlongReversedMirrorAxis) {
  const Index bits = 3, m = Index{1} << bits;
  const auto g = QuanticsGrid::box(bits, 2, 0.0, 1.0, QuanticsOrdering::Mirror);
  for (Index dim : {0u, 1u}) {
    const Matrix t = to_dense(shift_mpo(g, 3, false, dim));
    Matrix expect = Matrix::Zero(m * m, m * m);
    for (std::uint64_t x = 0; x < m; ++x)
      for (std::uint64_t y = 0; y < m; ++y) {
        std::vector<std::uint64_t> src{x, y};
        src[dim] += 3;
        if (src[dim] < m) expect(flat_index(g, {x, y}), flat_index(g, src)) = 1.0;
      }
    EXPECT_LT((t - expect).cwiseAbs().maxCoeff(), 1e-14) << "dim " << dim;
  }
}

TEST(Quantics, LaplacianMatchesStencil) {
  const Index bits = 5;
  const auto g = QuanticsGrid::line(bits, 0.0, 2.0);
  for (bool periodic : {false, true}) {
    const auto lap = laplacian_mpo(g, periodic ? Boundary::Periodic : Boundary::Open);
    EXPECT_LE(lap.max_bond(), 3u);
    const Matrix expect = stencil(bits, g.step(0), periodic);
    EXPECT_LT((to_dense(lap) - expect).cwiseAbs().maxCoeff(), 1e-9 * expect.cwiseAbs().maxCoeff());
  }
}

TEST(Quantics, LaplacianOfPolynomials) {
  const auto g = QuanticsGrid::line(8, 0.0, 1.0);
  const auto lap = laplacian_mpo(g, Boundary::Open);
  const Vector lin = dense_of(apply_zipup(lap, poly_mps(g, {0.3, 1.0}), TruncationSpec::exact()).train);
  const Vector sq = dense_of(apply_zipup(lap, poly_mps(g, {0.0, 0.0, 1.0}), TruncationSpec::exact()).train);
  for (Index n = 1; n + 1 < g.points(); ++n) {
    EXPECT_NEAR(std::abs(lin(n)), 0.0, 1e-9);
    EXPECT_NEAR(sq(n).real(), 2.0, 1e-9);
    EXPECT_NEAR(sq(n).imag(), 0.0, 1e-9);
  }
}

TEST(Quantics, LaplacianInTwoDimensions) {
  const Index bits = 3, m = Index{1} << bits;
  for (auto ord : {QuanticsOrdering::Serial, QuanticsOrdering::Interleaved, QuanticsOrdering::Mirror}) {
    QuanticsGrid g = QuanticsGrid::box(bits, 2, 0.0, 1.0, ord);
    g.hi[1] = 3.0;
    const Matrix lap = to_dense(laplacian_mpo(g, Boundary::Open));
    const Matrix lx = stencil(bits, g.step(0), false), ly = stencil(bits, g.step(1), false);
    Matrix expect = Matrix::Zero(m * m, m * m);
    for (std::uint64_t x = 0; x < m; ++x)
      for (std::uint64_t y = 0; y < m; ++y)
        for (std::uint64_t x2 = 0; x2 < m; ++x2)
          for (std::uint64_t y2 = 0; y2 < m; ++y2) {
            Scalar v = 0.0;
            if (y == y2) v += lx(x, x2);
            if (x == x2) v += ly(y, y2);
            expect(flat_index(g, {x, y}), flat_index(g, {x2, y2})) = v;
          }
    EXPECT_LT((lap - expect).cwiseAbs().maxCoeff(), 1e-9 * expect.cwiseAbs().maxCoeff());
  }
}

TEST(Quantics, IntegralIsCumulativeSum) {
  const Index bits = 6, m = Index{1} << bits;
  const auto g = QuanticsGrid::line(bits, 0.0, 1.0);
  for (bool inclusive : {true, false}) {
    const auto op = integral_mpo(g, inclusive);
    EXPECT_EQ(op.max_bond(), 2u);
    Matrix expect = Matrix::Zero(m, m);
    for (Index n = 0; n < m; ++n)
      for (Index k = 0; k < m; ++k) expect(n, k) = (k < n || (inclusive && k == n)) ? 1.0 : 0.0;
    EXPECT_LT((to_dense(op) - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto counts =
      dense_of(apply_zipup(integral_mpo(g), TensorTrain::constant(std::vector<Index>(bits, 2), 1.0),
                           TruncationSpec::exact()).train);
  for (Index n = 0; n < m; ++n) EXPECT_NEAR(counts(n).real(), double(n + 1), 1e-10);
}

TEST(Quantics, IntegralAlongMirrorAxis) {
  const Index bits = 3, m = Index{1} << bits;
  const auto g = QuanticsGrid::box(bits, 2, 0.0, 1.0, QuanticsOrdering::Mirror);
  const Matrix op = to_dense(integral_mpo(g, true, 1));
  for (std::uint64_t x = 0; x < m; ++x)
    for (std::uint64_t y = 0; y < m; ++y)
      for (std::uint64_t x2 = 0; x2 < m; ++x2)
        for (std::uint64_t y2 = 0; y2 < m; ++y2) {
          const double v = (x == x2 && y2 <= y) ? 1.0 : 0.0;
          EXPECT_NEAR(std::abs(op(flat_index(g, {x, y}), flat_index(g, {x2, y2})) - v), 0.0, 1e-12);
        }
}

TEST(Quantics, QftSingleBitIsHadamard) {
  const Matrix f = to_dense(qft_mpo(1, 4));
  EXPECT_LT((f - dft(1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quantics, QftMatchesBitReversedDft) {
  const Index bits = 8, m = Index{1} << bits;
  const Matrix f = dft(bits);
  for (auto [chi, tol] : {std::pair<Index, double>{15, 1e-12}, {10, 1e-6}}) {
    const auto q = qft_mpo(bits, chi);
    EXPECT_LE(q.max_bond(), chi);
    const Matrix d = to_dense(q);
    double err = 0.0;
    for (Index r = 0; r < m; ++r)
      for (Index t = 0; t < m; ++t) err = std::max(err, std::abs(d(r, t) - f(reverse_bits(r, bits), t)));
    EXPECT_LT(err, tol) << "chi " << chi;
  }
}

TEST(Quantics, QftIsUnitary) {
  const Index bits = 8;
  const Matrix d = to_dense(qft_mpo(bits, 15));
  const Matrix defect = d.adjoint() * d - Matrix::Identity(d.cols(), d.cols());
  EXPECT_LT(defect.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Quantics, BitReverse) {
  RandomSource rng(15);
  const auto tt = TensorTrain::random(std::vector<Index>(6, 2), 3, rng);
  EXPECT_LT(max_diff(dense_of(bit_reverse(bit_reverse(tt))), dense_of(tt)), 1e-15);

  const auto prod = TensorTrain::product_state({1, 0, 0, 1, 1, 0}, std::vector<Index>(6, 2));
  const auto rev = bit_reverse(prod);
  EXPECT_EQ(evaluate(rev, {0, 1, 1, 0, 0, 1}), Scalar(1.0));

  const Vector standard = dense_of(bit_reverse(apply_zipup(qft_mpo(6), tt, TruncationSpec::exact()).train));
  EXPECT_LT(max_diff(standard, dft(6) * dense_of(tt)), 1e-12);
}

TEST(Quantics, SignedWavenumbers) {
  EXPECT_DOUBLE_EQ(signed_wavenumber(0, 4, 2 * pi), 0.0);
  EXPECT_DOUBLE_EQ(signed_wavenumber(3, 4, 2 * pi), 3.0);
  EXPECT_DOUBLE_EQ(signed_wavenumber(8, 4, 2 * pi), 8.0);
  EXPECT_DOUBLE_EQ(signed_wavenumber(9, 4, 2 * pi), -7.0);
  EXPECT_DOUBLE_EQ(signed_wavenumber(15, 4, 1.0), -2 * pi);
}

namespace {

// Dense pipeline: FFT, multiply by exp(-k^2 t), inverse FFT.
Vector heat_oracle(const Vector& u0, double t, Index bits, double length) {
  Eigen::FFT<double> fft;
  std::vector<Scalar> in(u0.data(), u0.data() + u0.size()), spec, out;
  fft.fwd(spec, in);
  for (Index w = 0; w < spec.size(); ++w) {
    const double k = signed_wavenumber(w, bits, length);
    spec[w] *= std::exp(-k * k * t);
  }
  fft.inv(out, spec);
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace

TEST(Quantics, HeatAtTimeZeroReturnsInitialCondition) {
  const auto g = QuanticsGrid::line(10, 0.0, 2 * pi);
  auto u0 = [](const std::vector<double>& x) { return Scalar(std::exp(std::sin(x[0]))); };
  const auto res = heat_solve(u0, 0.0, g);
  const Vector expect = samples(g, [&](double x) { return u0({x}); });
  EXPECT_LT(max_diff(dense_of(res.solution), expect), 1e-10);
}

TEST(Quantics, HeatMatchesDenseFourierPipeline) {
  const Index bits = 12;
  const auto g = QuanticsGrid::line(bits, 0.0, 2 * pi);
  auto u0 = [](const std::vector<double>& x) { return Scalar(std::exp(std::sin(x[0])) + 0.3 * std::cos(5 * x[0])); };
  const Vector v0 = samples(g, [&](double x) { return u0({x}); });
  for (double t : {0.01, 0.2}) {
    const auto res = heat_solve(u0, t, g);
    EXPECT_LT(max_diff(dense_of(res.solution), heat_oracle(v0, t, bits, 2 * pi)), 1e-7) << "t=" << t;
  }
}

TEST(Quantics, HeatSmoothsSteps) {
  const Index bits = 16;
  const auto g = QuanticsGrid::line(bits, 0.0, 10.0);
  auto u0 = [](const std::vector<double>& x) {
    const double s = (x[0] >= 3.5 && x[0] < 6.5) ? 1.0 : 0.0;
    return Scalar((1.0 + std::cos(120 * x[0]) * std::sin(180 * x[0])) / 100.0 + s);
  };
  const auto res = heat_solve(u0, 0.05, g);
  const Vector v0 = samples(g, [&](double x) { return u0({x}); });
  EXPECT_LT(max_diff(dense_of(res.initial), v0), 1e-8);
  const Vector ut = dense_of(res.solution);
  auto jump = [&](const Vector& v) {
    double j = 0.0;
    for (Index n = 0; n + 1 < Index(v.size()); ++n) j = std::max(j, std::abs(v(n + 1) - v(n)));
    return j;
  };
  EXPECT_GT(jump(v0), 0.9);
  EXPECT_LT(jump(ut), 0.01);
  // Mean is conserved by periodic diffusion.
  EXPECT_NEAR(std::abs(ut.sum() - v0.sum()) / std::abs(v0.sum()), 0.0, 1e-8);
  EXPECT_LT(max_diff(ut, heat_oracle(v0, 0.05, bits, 10.0)), 1e-6);
}

TEST(Quantics, HelmholtzAssembly) {
  const Index bits = 6;
  const auto g = QuanticsGrid::line(bits, 0.0, 1.0);
  auto zero = [](const std::vector<double>&) { return Scalar(0.0); };
  const Matrix lap = stencil(bits, g.step(0), false);
  const double scale = lap.cwiseAbs().maxCoeff();
  EXPECT_LT((to_dense(helmholtz_assemble(zero, g)) - lap).cwiseAbs().maxCoeff(), 1e-12 * scale);

  auto rho = [](const std::vector<double>& x) { return Scalar(1.0 + x[0] * x[0]); };
  Matrix expect = lap;
  for (Index n = 0; n < g.points(); ++n) expect(n, n) -= rho({g.coordinate(0, n)});
  EXPECT_LT((to_dense(helmholtz_assemble(rho, g)) - expect).cwiseAbs().maxCoeff(), 1e-12 * scale);

  auto constant = [](const std::vector<double>&) { return Scalar(7.0); };
  const Eigen::SelfAdjointEigenSolver<Matrix> base(lap), shifted(to_dense(helmholtz_assemble(constant, g)));
  EXPECT_LT((shifted.eigenvalues() - (base.eigenvalues().array() - 7.0).matrix()).cwiseAbs().maxCoeff(),
            1e-9 * scale);
}

TEST(Quantics, PoissonZeroSource) {
  const auto g = QuanticsGrid::line(8, 0.0, 1.0);
  auto zero = [](const std::vector<double>&) { return Scalar(0.0); };
  auto rho = [](const std::vector<double>&) { return Scalar(1.0); };
  const auto res = poisson_solve(zero, rho, g);
  EXPECT_EQ(norm(res.solution), 0.0);
}

TEST(Quantics, PoissonOneDimensionalMatchesDense) {
  const Index bits = 8;
  const auto g = QuanticsGrid::line(bits, 0.0, 1.0);
  auto src = [](const std::vector<double>& x) { return Scalar(std::sin(pi * x[0]) + x[0]); };
  const Vector n = samples(g, [&](double x) { return src({x}); });
  const Matrix lap = stencil(bits, g.step(0), false);
  for (double r : {0.0, 1e4}) {
    auto rho = [r](const std::vector<double>&) { return Scalar(r); };
    const auto res = poisson_solve(src, rho, g);
    EXPECT_LT(res.residual, 1e-8);
    const Matrix a = lap - r * Matrix::Identity(lap.rows(), lap.cols());
    const Vector exact = a.partialPivLu().solve(n);
    const Vector got = dense_of(res.solution);
    EXPECT_LT(max_diff(got, exact), 1e-7 * exact.cwiseAbs().maxCoeff()) << "rho " << r;
    if (r > 0.0) {
      // A large rho pins U to -n / rho away from the walls.
      EXPECT_LT(std::abs(got(g.points() / 2) + n(g.points() / 2) / r), 1e-3 * std::abs(n(g.points() / 2) / r));
    }
  }
}

TEST(Quantics, PoissonTwoDimensionalMatchesSparseSolve) {
  const Index bits = 6, m = Index{1} << bits;
  const auto g = QuanticsGrid::box(bits, 2, 0.0, 1.0, QuanticsOrdering::Interleaved);
  auto src = [](const std::vector<double>& x) {
    return Scalar(std::exp(-20 * ((x[0] - 0.4) * (x[0] - 0.4) + (x[1] - 0.6) * (x[1] - 0.6))));
  };
  auto rho = [](const std::vector<double>& x) { return Scalar(10.0 * x[0]); };
  const auto res = poisson_solve(src, rho, g);
  EXPECT_LT(res.residual, 1e-6);

  using Sparse = Eigen::SparseMatrix<Scalar>;
  std::vector<Eigen::Triplet<Scalar>> entries;
  const double inv = 1.0 / (g.step(0) * g.step(0));
  Vector b(m * m);
  for (std::uint64_t x = 0; x < m; ++x)
    for (std::uint64_t y = 0; y < m; ++y) {
      const Index row = flat_index(g, {x, y});
      const double px = g.coordinate(0, x), py = g.coordinate(1, y);
      b(row) = src({px, py});
      entries.emplace_back(row, row, -4.0 * inv - rho({px, py}));
      if (x > 0) entries.emplace_back(row, flat_index(g, {x - 1, y}), inv);
      if (x + 1 < m) entries.emplace_back(row, flat_index(g, {x + 1, y}), inv);
      if (y > 0) entries.emplace_back(row, flat_index(g, {x, y - 1}), inv);
      if (y + 1 < m) entries.emplace_back(row, flat_index(g, {x, y + 1}), inv);
    }
  Sparse a(m * m, m * m);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Sparse> lu(a);
  const Vector exact = lu.solve(b);
  EXPECT_LT(max_diff(dense_of(res.solution), exact), 1e-6 * exact.cwiseAbs().maxCoeff());
}

TEST(Quantics, SchrodingerHarmonicWell) {
  const Index bits = 8;
  const auto g = QuanticsGrid::line(bits, -8.0, 8.0);
  auto v = [](const std::vector<double>& x) { return Scalar(x[0] * x[0]); };
  const auto res = schrodinger_ground_state(v, g);
  Matrix h = -stencil(bits, g.step(0), false);
  for (Index n = 0; n < g.points(); ++n) h(n, n) += v({g.coordinate(0, n)});
  const double exact = oracle::ground_energy(h);
  EXPECT_NEAR(res.energy, exact, 1e-6);
  EXPECT_NEAR(exact, 1.0, 1e-2);
}
