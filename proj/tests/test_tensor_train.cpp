#include "dense_oracles.hpp"
#include "tnkit/io.hpp"
#include "tnkit/tensor_train.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

using namespace tnkit;
using oracle::flat;

namespace {

double vec_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<Index> qubits(Index n) { return std::vector<Index>(n, 2); }

Vector dense_of(const TensorTrain& tt) { return flat(to_dense(tt)); }

bool left_isometric(const DenseTensor& c) {
  Matrix m = c.matrix(2);
  return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() < 1e-12;
}

bool right_isometric(const DenseTensor& c) {
  Matrix m = c.matrix(1);
  return (m * m.adjoint() - Matrix::Identity(m.rows(), m.rows())).cwiseAbs().maxCoeff() < 1e-12;
}

}  // namespace

TEST(TensorTrain, ValidatesShapes) {
  EXPECT_THROW(TensorTrain(std::vector<DenseTensor>{}), std::invalid_argument);
  EXPECT_THROW(TensorTrain({DenseTensor({1, 2, 2}), DenseTensor({3, 2, 1})}), std::invalid_argument);
  EXPECT_THROW(TensorTrain({DenseTensor({2, 2, 1})}), std::invalid_argument);
  EXPECT_NO_THROW(TensorTrain({DenseTensor({1, 2, 3}), DenseTensor({3, 2, 1})}));
}

TEST(TensorTrain, DenseRoundTrip) {
  RandomSource rng(1);
  for (Index n = 1; n <= 6; ++n) {
    std::vector<Index> dims;
    for (Index k = 0; k < n; ++k) dims.push_back(2 + rng.below(2));
    DenseTensor v = rng.complex_tensor(dims);
    TensorTrain tt = from_dense(v);
    EXPECT_LT(vec_diff(dense_of(tt), flat(v)), 1e-12);
  }
}

TEST(TensorTrain, EvaluateMatchesDense) {
  RandomSource rng(2);
  TensorTrain tt = TensorTrain::random({2, 3, 2, 2}, 3, rng);
  DenseTensor d = to_dense(tt);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 3; ++b) {
      std::vector<Index> idx{a, b, 1, 0};
      EXPECT_LT(std::abs(evaluate(tt, idx) - d.at(idx)), 1e-13);
    }
}

TEST(TensorTrain, CanonicalFormIsIsometricAndPreservesState) {
  RandomSource rng(3);
  TensorTrain tt = TensorTrain::random(qubits(7), 6, rng);
  Vector ref = dense_of(tt);
  for (Index c : {0u, 3u, 6u}) {
    TensorTrain t = tt;
    canonicalize(t, c);
    EXPECT_LT(vec_diff(dense_of(t), ref), 1e-12);
    for (Index k = 0; k < c; ++k) EXPECT_TRUE(left_isometric(t.core(k)));
    for (Index k = c + 1; k < 7; ++k) EXPECT_TRUE(right_isometric(t.core(k)));
    EXPECT_NEAR(t.core(c).norm(), ref.norm(), 1e-12 * ref.norm());
    move_center(t, 2);
    EXPECT_LT(vec_diff(dense_of(t), ref), 1e-12);
    for (Index k = 0; k < 2; ++k) EXPECT_TRUE(left_isometric(t.core(k)));
    for (Index k = 3; k < 7; ++k) EXPECT_TRUE(right_isometric(t.core(k)));
  }
}

TEST(TensorTrain, CompressErrorMatchesDiscardedWeight) {
  RandomSource rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    TensorTrain tt = TensorTrain::random(qubits(8), 8, rng);
    Vector ref = dense_of(tt);
    CompressResult r = compress(tt, TruncationSpec::rank(4));
    EXPECT_LE(r.train.max_bond(), 4u);
    const double err2 = (dense_of(r.train) - ref).squaredNorm() / ref.squaredNorm();
    EXPECT_NEAR(err2, r.discarded_weight, 1e-10);
  }
}

TEST(TensorTrain, CompressToleranceBoundsTotalWeight) {
  RandomSource rng(5);
  TensorTrain tt = TensorTrain::random(qubits(8), 8, rng);
  for (double tol : {1e-1, 1e-2}) {
    CompressResult r = compress(tt, TruncationSpec::tolerance(tol));
    EXPECT_LE(r.discarded_weight, tol);
  }
}

TEST(TensorTrain, CompressIsIdempotentAtRankCap) {
  RandomSource rng(6);
  TensorTrain tt = TensorTrain::random(qubits(8), 8, rng);
  CompressResult once = compress(tt, TruncationSpec::rank(3));
  CompressResult twice = compress(once.train, TruncationSpec::rank(3));
  EXPECT_LT(twice.discarded_weight, 1e-20);
  EXPECT_LT(vec_diff(dense_of(twice.train), dense_of(once.train)), 1e-12);
}

TEST(TensorTrain, ExactCompressionFindsMinimalRank) {
  RandomSource rng(7);
  TensorTrain a = TensorTrain::random(qubits(6), 2, rng);
  TensorTrain sum = add(a, a);  // bonds 4, rank 2
  CompressResult r = compress(sum, TruncationSpec::exact());
  EXPECT_EQ(r.train.max_bond(), 2u);
  EXPECT_LT(vec_diff(dense_of(r.train), 2.0 * dense_of(a)), 1e-12);
}

TEST(TensorTrain, InnerAndNormMatchDense) {
  RandomSource rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    TensorTrain a = TensorTrain::random({2, 3, 2, 2, 3}, 4, rng);
    TensorTrain b = TensorTrain::random({2, 3, 2, 2, 3}, 3, rng);
    Scalar ref = dense_of(a).dot(dense_of(b));  // conjugates the first argument
    EXPECT_LT(std::abs(inner(a, b) - ref), 1e-12 * std::abs(ref) + 1e-13);
    EXPECT_NEAR(norm(a), dense_of(a).norm(), 1e-12);
  }
}

TEST(TensorTrain, SandwichAndExpectationMatchDense) {
  RandomSource rng(9);
  TensorTrainOperator op = TensorTrainOperator::random(qubits(5), 3, rng);
  TensorTrain a = TensorTrain::random(qubits(5), 3, rng);
  TensorTrain b = TensorTrain::random(qubits(5), 2, rng);
  Matrix m = to_dense(op);
  Scalar ref = dense_of(a).dot(m * dense_of(b));
  EXPECT_LT(std::abs(sandwich(a, op, b) - ref), 1e-12 * std::abs(ref));
  std::map<Index, Matrix> ops{{1, oracle::pauli_z()}, {3, oracle::pauli_x()}};
  Matrix zx = oracle::embed(oracle::pauli_z(), 1, 5) * oracle::embed(oracle::pauli_x(), 3, 5);
  Vector va = dense_of(a);
  Scalar ev = va.dot(zx * va) / va.squaredNorm();
  EXPECT_LT(std::abs(expect_local(a, ops) - ev), 1e-12);
  EXPECT_THROW(expect_local(a, {{7, oracle::pauli_z()}}), std::out_of_range);
}

TEST(TensorTrain, OperatorDenseRoundTrip) {
  RandomSource rng(10);
  Matrix m = rng.complex_matrix(16, 16);
  TensorTrainOperator op = operator_from_dense(m, qubits(4));
  EXPECT_LT((to_dense(op) - m).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((to_dense(adjoint(op)) - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TensorTrain, AddAndHadamardMatchDense) {
  RandomSource rng(11);
  for (Index n : {1u, 2u, 5u}) {
    TensorTrain a = TensorTrain::random(qubits(n), 3, rng);
    TensorTrain b = TensorTrain::random(qubits(n), 2, rng);
    TensorTrain s = add(a, b);
    EXPECT_LT(vec_diff(dense_of(s), dense_of(a) + dense_of(b)), 1e-12);
    auto bonds = s.bond_dims(), ba = a.bond_dims(), bb = b.bond_dims();
    for (Index k = 0; k < bonds.size(); ++k) EXPECT_EQ(bonds[k], ba[k] + bb[k]);
    TensorTrain h = hadamard_product(a, b);
    EXPECT_LT(vec_diff(dense_of(h), dense_of(a).cwiseProduct(dense_of(b))), 1e-12);
    TensorTrain ones = TensorTrain::constant(qubits(n), 1.0);
    EXPECT_LT(vec_diff(dense_of(hadamard_product(a, ones)), dense_of(a)), 1e-12);
  }
}

TEST(TensorTrain, ZipupMatchesDenseProduct) {
  RandomSource rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    TensorTrainOperator op = TensorTrainOperator::random(qubits(6), 3, rng);
    TensorTrain v = TensorTrain::random(qubits(6), 4, rng);
    ApplyResult r = apply_zipup(op, v, TruncationSpec::exact());
    Vector ref = to_dense(op) * dense_of(v);
    EXPECT_LT(vec_diff(dense_of(r.train), ref), 1e-10 * ref.norm());
    for (Index k = 0; k + 1 < 6; ++k) EXPECT_TRUE(left_isometric(r.train.core(k)));
  }
}

TEST(TensorTrain, OperatorProductMatchesDense) {
  RandomSource rng(13);
  TensorTrainOperator a = TensorTrainOperator::random(qubits(4), 2, rng);
  TensorTrainOperator b = TensorTrainOperator::random(qubits(4), 3, rng);
  Matrix ref = to_dense(a) * to_dense(b);
  EXPECT_LT((to_dense(op_product(a, b)) - ref).cwiseAbs().maxCoeff(), 1e-10 * ref.norm());
  Matrix sum = to_dense(a) + to_dense(b);
  EXPECT_LT((to_dense(add(a, b)) - sum).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TensorTrain, FitRecoversExactProductWithEnoughRank) {
  RandomSource rng(14);
  TensorTrainOperator op = TensorTrainOperator::random(qubits(6), 2, rng);
  TensorTrain v = TensorTrain::random(qubits(6), 2, rng);
  Vector ref = to_dense(op) * dense_of(v);
  for (FitMode mode : {FitMode::TwoSite, FitMode::OneSiteEnriched}) {
    TensorTrain guess = TensorTrain::random(qubits(6), 1, rng);
    FitResult r = fit_apply(op, v, guess, {mode, 8, 3});
    EXPECT_NEAR(r.fidelity, 1.0, 1e-10);
    EXPECT_LT(vec_diff(dense_of(r.train), ref), 1e-8 * ref.norm());
  }
}

TEST(TensorTrain, OneSiteFitFidelityNeverDecreases) {
  RandomSource rng(15);
  TensorTrainOperator op = TensorTrainOperator::random(qubits(8), 3, rng);
  TensorTrain v = TensorTrain::random(qubits(8), 4, rng);
  TensorTrain guess = compress(apply_zipup(op, v, TruncationSpec::exact()).train, TruncationSpec::rank(3)).train;
  for (FitMode mode : {FitMode::OneSite, FitMode::OneSiteEnriched}) {
    FitResult r = fit_apply(op, v, guess, {mode, 3, 4});
    for (Index q = 1; q < r.fidelity_history.size(); ++q) {
      EXPECT_GE(r.fidelity_history[q], r.fidelity_history[q - 1] - 1e-12);
    }
    Vector ref = to_dense(op) * dense_of(v);
    Vector fit = dense_of(r.train);
    double f = std::norm(ref.dot(fit)) / (ref.squaredNorm() * fit.squaredNorm());
    EXPECT_NEAR(r.fidelity, f, 1e-10);
  }
}

TEST(TensorTrain, EntanglementEntropyMatchesDense) {
  RandomSource rng(16);
  TensorTrain tt = TensorTrain::random(qubits(6), 4, rng);
  Vector v = dense_of(tt);
  v /= v.norm();
  // left block = sites 0..2 = fastest index
  Matrix m = Eigen::Map<Matrix>(v.data(), 8, 8);
  Eigen::JacobiSVD<Matrix> svd(m);
  double ref = 0;
  for (Eigen::Index q = 0; q < svd.singularValues().size(); ++q) {
    double p = svd.singularValues()(q) * svd.singularValues()(q);
    if (p > 0) ref -= p * std::log(p);
  }
  EXPECT_NEAR(entanglement_entropy(tt, 2), ref, 1e-12);
}

TEST(TensorTrain, SamplingMatchesBornDistribution) {
  RandomSource rng(17);
  TensorTrain tt = TensorTrain::random(qubits(4), 3, rng);
  normalize(tt);
  Vector v = dense_of(tt);
  const Index draws = 100000;
  std::vector<double> counts(16, 0.0);
  for (const auto& s : sample_many(tt, rng, draws)) {
    Index idx = 0;
    for (Index k = 0; k < 4; ++k) idx |= s[k] << k;
    counts[idx] += 1.0;
  }
  double tv = 0;
  for (Index i = 0; i < 16; ++i) tv += std::abs(counts[i] / draws - std::norm(v(i)));
  EXPECT_LT(0.5 * tv, 0.02);
  TensorTrain unnormalized = scaled(tt, 2.0);
  EXPECT_THROW(sample(unnormalized, rng), std::invalid_argument);
}


TEST(Serialization, RoundTripIsBitwise) {
  RandomSource rng(18);
  TensorTrain tt = TensorTrain::random({2, 3, 2, 4}, 3, rng);
  canonicalize(tt, 2);
  const auto dir = std::filesystem::temp_directory_path() / "tnkit_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "state.tt").string();
  save_train(tt, path);
  TensorTrain back = load_train(path);
  ASSERT_EQ(back.size(), tt.size());
  EXPECT_EQ(back.center(), tt.center());
  for (Index k = 0; k < tt.size(); ++k) {
    ASSERT_EQ(back.core(k).dims(), tt.core(k).dims());
    EXPECT_EQ(std::memcmp(back.core(k).ptr(), tt.core(k).ptr(), tt.core(k).size() * sizeof(Scalar)), 0);
  }
  std::ifstream meta(path + ".json");
  std::string text((std::istreambuf_iterator<char>(meta)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("\"physical_extents\""), std::string::npos);

  TensorTrainOperator op = TensorTrainOperator::random({2, 2, 2}, 2, rng);
  save_operator(op, path + ".op");
  TensorTrainOperator op_back = load_operator(path + ".op");
  EXPECT_EQ((to_dense(op_back) - to_dense(op)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(load_train(path + ".op"), std::runtime_error);
  std::filesystem::remove_all(dir);
}
