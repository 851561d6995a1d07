#pragma once

#include "tnkit/tensor.hpp"

#include <cstdint>
#include <random>

namespace tnkit {

// Seeded pseudo-random source; identical seeds give identical streams.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  Scalar complex_normal() { return {normal(), normal()}; }
  Index below(Index n) { return std::uniform_int_distribution<Index>(0, n - 1)(engine_); }
  std::mt19937_64& engine() { return engine_; }

  Matrix complex_matrix(Index rows, Index cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = complex_normal();
    return m;
  }

  DenseTensor complex_tensor(std::vector<Index> dims) {
    DenseTensor t(std::move(dims));
    for (Scalar& v : t.data()) v = complex_normal();
    return t;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tnkit
