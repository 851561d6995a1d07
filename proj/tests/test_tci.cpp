#include "dense_oracles.hpp"
#include "tnkit/tci.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace tnkit;

namespace {

// Entry oracle backed by a random tensor train of the given rank.
struct LowRankTensor {
  TensorTrain tt;
  LowRankTensor(std::vector<Index> extents, Index rank, std::uint64_t seed) {
    RandomSource rng(seed);
    tt = TensorTrain::random(extents, rank, rng);
  }
  Scalar operator()(const MultiIndex& idx) const { return evaluate(tt, idx); }
};

std::vector<MultiIndex> all_indices(const std::vector<Index>& extents) {
  std::vector<MultiIndex> out{MultiIndex{}};
  for (Index d : extents) {
    std::vector<MultiIndex> next;
    for (const auto& p : out)
      for (Index s = 0; s < d; ++s) {
        MultiIndex q = p;
        q.push_back(s);
        next.push_back(q);
      }
    out = std::move(next);
  }
  return out;
}

double max_entry_error(TciState& st, const TciOracle& f) {
  TensorTrain tt = st.to_tt();
  double err = 0.0;
  for (const auto& idx : all_indices(st.extents())) err = std::max(err, std::abs(evaluate(tt, idx) - f(idx)));
  return err;
}

}  // namespace

TEST(Quadrature, TablesAreConsistent) {
  for (Index n : {15u, 21u, 41u, 61u}) {
    QuadratureRule q = gauss_kronrod(n);
    ASSERT_EQ(q.size(), n);
    EXPECT_NEAR(std::accumulate(q.weights.begin(), q.weights.end(), 0.0), 2.0, 1e-13);
    for (Index k = 1; k < n; ++k) EXPECT_LT(q.nodes[k - 1], q.nodes[k]);
    for (Index k = 0; k < n; ++k) {
      EXPECT_NEAR(q.nodes[k], -q.nodes[n - 1 - k], 1e-16);
      EXPECT_GT(q.weights[k], 0.0);
    }
    EXPECT_EQ(q.nodes[n / 2], 0.0);
  }
  EXPECT_EQ(quadrature_rule("gk21").size(), 21u);
  EXPECT_EQ(quadrature_rule("gk21").label, "gk21");
}

TEST(Quadrature, KronrodIntegratesMonomials) {
  // An n-point Kronrod extension of a g-point Gauss rule is exact to degree 3g + 1.
  for (auto [n, degree] : std::vector<std::pair<Index, int>>{{15, 22}, {21, 31}, {41, 61}, {61, 91}}) {
    QuadratureRule q = gauss_kronrod(n);
    for (int k = 0; k <= degree; ++k) {
      double sum = 0.0;
      for (Index i = 0; i < n; ++i) sum += q.weights[i] * std::pow(q.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(sum, exact, 1e-12) << "rule " << n << " degree " << k;
    }
  }
}

TEST(Quadrature, TrapezoidalRule) {
  QuadratureRule q = quadrature_rule("trap:5");
  ASSERT_EQ(q.size(), 5u);
  EXPECT_DOUBLE_EQ(q.nodes.front(), -1.0);
  EXPECT_DOUBLE_EQ(q.nodes.back(), 1.0);
  EXPECT_NEAR(std::accumulate(q.weights.begin(), q.weights.end(), 0.0), 2.0, 1e-15);
  EXPECT_THROW(quadrature_rule("trap:1"), std::invalid_argument);
  EXPECT_THROW(quadrature_rule("trap:x"), std::invalid_argument);
  EXPECT_THROW(quadrature_rule("gauss"), std::invalid_argument);
}

TEST(Tci, SeparableTensorIsRankOne) {
  auto f = [](const MultiIndex& idx) {
    Scalar v = 1.0;
    for (Index k = 0; k < idx.size(); ++k) v *= 1.0 + 0.3 * double(idx[k]) + 0.1 * double(k);
    return v;
  };
  for (PivotSearch search : {PivotSearch::Full, PivotSearch::Rook}) {
    TciOptions opt;
    opt.search = search;
    TciState st = tci_build(f, {3, 3, 3, 3, 3}, opt);
    EXPECT_TRUE(st.converged());
    EXPECT_EQ(st.sweeps_done(), 1u);
    for (Index r : st.ranks()) EXPECT_EQ(r, 1u);
    EXPECT_LT(max_entry_error(st, f), 1e-13);
  }
}

TEST(Tci, RecoversLowRankTensor) {
  LowRankTensor t({3, 3, 3, 3}, 3, 41);
  TciState st = tci_build(std::ref(t), {3, 3, 3, 3});
  EXPECT_TRUE(st.converged());
  EXPECT_LT(max_entry_error(st, std::ref(t)), 1e-10);
  EXPECT_TRUE(st.nesting_holds());
  for (Index b = 1; b < 4; ++b) EXPECT_LE(st.pivot_error(b), 1e-12 * st.max_sample());
}

TEST(Tci, ExactRankEnumerationSuite) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    RandomSource pick(seed + 100);
    const Index n = 3 + pick.below(4);  // 3..6 sites
    std::vector<Index> extents(n);
    for (auto& d : extents) d = 2 + pick.below(3);
    const Index rank = 1 + pick.below(3);
    LowRankTensor t(extents, rank, seed);
    for (PivotSearch search : {PivotSearch::Full, PivotSearch::Rook}) {
      TciOptions opt;
      opt.tol = 1e-12;
      opt.search = search;
      TciState st = tci_build(std::ref(t), extents, opt);
      EXPECT_LT(max_entry_error(st, std::ref(t)), 1e-10 * st.max_sample()) << "seed " << seed;
      EXPECT_TRUE(st.nesting_holds());
    }
  }
}

TEST(Tci, InterpolatesOnPivots) {
  auto f = [](const MultiIndex& idx) {
    double x = 0.0;
    for (Index k = 0; k < idx.size(); ++k) x += double(idx[k]) / (k + 1.0);
    return Scalar(std::sin(x) + 0.5 * std::cos(3 * x));
  };
  TciOptions opt;
  opt.max_sweeps = 3;
  TciState st = tci_build(f, {5, 5, 5, 5, 5}, opt);
  TensorTrain tt = st.to_tt();
  for (Index b = 1; b < st.size(); ++b) {
    ASSERT_EQ(st.rows(b).size(), st.cols(b).size());
    for (Index k = 0; k < st.rows(b).size(); ++k) {
      MultiIndex idx = st.rows(b)[k];
      idx.insert(idx.end(), st.cols(b)[k].begin(), st.cols(b)[k].end());
      EXPECT_LT(std::abs(evaluate(tt, idx) - f(idx)), 1e-10 * st.max_sample());
    }
  }
}

TEST(Tci, PivotErrorMatchesTrainErrorOnBlock) {
  auto f = [](const MultiIndex& idx) {
    double x = 0.0;
    for (Index k = 0; k < idx.size(); ++k) x += double(idx[k]) * (k + 1.0) / 7.0;
    return Scalar(1.0 / (1.0 + x * x));
  };
  TciOptions opt;
  opt.max_sweeps = 1;  // stop early so the errors are not negligible
  TciState st = tci_build(f, {6, 6, 6, 6}, opt);
  ASSERT_GT(st.pivot_error(1), 1e-8);
  // Bond 1 is the last one visited; its block spans I_0 x sites 0,1 x J_2.
  TensorTrain tt = st.to_tt();
  double block_err = 0.0;
  for (Index s1 = 0; s1 < 6; ++s1)
    for (Index s2 = 0; s2 < 6; ++s2)
      for (const auto& j : st.cols(2)) {
        MultiIndex idx{s1, s2};
        idx.insert(idx.end(), j.begin(), j.end());
        block_err = std::max(block_err, std::abs(evaluate(tt, idx) - f(idx)));
      }
  EXPECT_NEAR(block_err, st.pivot_error(1), 1e-12);
}

TEST(Tci, CallCountWithinBlockBound) {
  LowRankTensor t({4, 4, 4, 4, 4}, 3, 7);
  TciOptions opt;
  opt.max_sweeps = 4;
  TciState st = tci_build(std::ref(t), {4, 4, 4, 4, 4}, opt);
  Index bound = 0;
  for (Index b = 1; b < st.size(); ++b) bound += (st.rows(b - 1).size() * 4) * (4 * st.cols(b + 1).size());
  EXPECT_LE(st.oracle_calls(), st.sweeps_done() * bound + 1);
}

TEST(Tci, FullTensorFourSitesExtentTwo) {
  auto f = [](const MultiIndex& idx) { return Scalar(double(idx[0] + 2 * idx[1] + 4 * idx[2] + 8 * idx[3]) + 1.0); };
  TciOptions opt;
  opt.tol = 0.0;
  TciState st = tci_build(f, {2, 2, 2, 2}, opt);
  EXPECT_LT(max_entry_error(st, f), 1e-12);
}

TEST(Tci, ZeroInitialPivotIsReplaced) {
  auto f = [](const MultiIndex& idx) { return Scalar(double(idx[0] * idx[1] * idx[2])); };
  TciState st = tci_build(f, {3, 3, 3});
  EXPECT_GT(st.max_sample(), 0.0);
  EXPECT_LT(max_entry_error(st, f), 1e-12);
  EXPECT_THROW(tci_build([](const MultiIndex&) { return Scalar(0.0); }, {2, 2}), std::runtime_error);
}

// Only even sites matter, so every two-site slice is rank one while the
// tensor has rank two across each cut.
TEST(Tci, GlobalSearchEscapesSeparableSlices) {
  auto f = [](const MultiIndex& idx) {
    double v = 1.0;
    for (Index k = 0; k < idx.size(); k += 2) v += double(idx[k] << k);
    return Scalar(v);
  };
  const std::vector<Index> extents(8, 2);
  TciOptions local;
  local.tol = 1e-12;
  TciState stuck = tci_build(f, extents, local);
  EXPECT_TRUE(stuck.converged());
  EXPECT_GT(max_entry_error(stuck, f), 1.0);

  TciOptions global = local;
  global.global_samples = 32;
  TciState st = tci_build(f, extents, global);
  EXPECT_TRUE(st.converged());
  EXPECT_TRUE(st.nesting_holds());
  EXPECT_LT(max_entry_error(st, f), 1e-12);
  for (Index r : st.ranks()) EXPECT_LE(r, 2u);
}

TEST(Tci, GlobalPivotInsertion) {
  auto f = [](const MultiIndex& idx) { return Scalar(double(idx[0]) + 3.0 * double(idx[2]) + 1.0); };
  TciState st(f, {3, 3, 3});
  EXPECT_FALSE(st.add_global_pivot({0, 0, 0}));  // already a pivot
  EXPECT_TRUE(st.add_global_pivot({2, 0, 2}));
  EXPECT_TRUE(st.nesting_holds());
  EXPECT_EQ(st.ranks(), (std::vector<Index>{2, 2}));
  EXPECT_LT(std::abs(st.evaluate({2, 0, 2}) - f({2, 0, 2})), 1e-12);
  EXPECT_LT(max_entry_error(st, f), 1e-12);
  EXPECT_THROW(st.add_global_pivot({0, 0}), std::invalid_argument);
}

TEST(Tci, OracleErrorsCarryTheIndex) {
  auto f = [](const MultiIndex& idx) -> Scalar {
    if (idx[1] == 2) throw std::domain_error("bad point");
    return 1.0;
  };
  try {
    tci_build(f, {3, 3, 3});
    FAIL() << "expected an OracleError";
  } catch (const OracleError& e) {
    EXPECT_EQ(e.index()[1], 2u);
    EXPECT_NE(std::string(e.what()).find("bad point"), std::string::npos);
  }
  auto nan = [](const MultiIndex& idx) { return Scalar(idx[0] == 1 ? std::nan("") : 1.0); };
  EXPECT_THROW(tci_build(nan, {2, 2}), OracleError);
}

TEST(Tci, SingleSite) {
  auto f = [](const MultiIndex& idx) { return Scalar(double(idx[0] * idx[0])); };
  TciState st = tci_build(f, {5});
  EXPECT_EQ(st.evaluate({3}), Scalar(9.0));
}

TEST(Integrate, ConstantFunction) {
  for (Index n : {1u, 3u, 6u}) {
    IntegrationResult r = integrate([](const std::vector<double>&) { return Scalar(1.0); }, n, -1.0, 1.0,
                                    gauss_kronrod(15));
    EXPECT_NEAR(r.value.real(), std::pow(2.0, double(n)), 1e-12);
  }
}

TEST(Integrate, SeparableGaussian) {
  QuadratureRule q = gauss_kronrod(21);
  double one_d = 0.0;
  for (Index k = 0; k < q.size(); ++k) one_d += 1.5 * q.weights[k] * std::exp(-std::pow(0.5 + 1.5 * q.nodes[k], 2));
  auto f = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return Scalar(std::exp(-s));
  };
  IntegrationResult r = integrate(f, 5, -1.0, 2.0, q);
  EXPECT_NEAR(r.value.real(), std::pow(one_d, 5), 1e-12);
  EXPECT_EQ(r.max_rank, 1u);
}

TEST(Integrate, CoupledIntegrandMatchesAnalyticValue) {
  // Integral over [0,1]^4 of cos(x1 + x2 + x3 + x4) = Re((e^i - 1)/i)^4.
  auto f = [](const std::vector<double>& x) { return Scalar(std::cos(x[0] + x[1] + x[2] + x[3])); };
  const Scalar one = (std::exp(Scalar(0, 1)) - 1.0) / Scalar(0, 1);
  for (PivotSearch search : {PivotSearch::Full, PivotSearch::Rook}) {
    TciOptions opt;
    opt.search = search;
    IntegrationResult r = integrate(f, 4, 0.0, 1.0, gauss_kronrod(15), opt);
    EXPECT_NEAR(r.value.real(), std::pow(one, 4).real(), 1e-13);
    EXPECT_EQ(r.max_rank, 2u);
    EXPECT_FALSE(r.trace.empty());
  }
}
