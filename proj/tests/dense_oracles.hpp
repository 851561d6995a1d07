#pragma once

// Reference implementations on explicit vectors and matrices.

#include "tnkit/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <vector>

namespace oracle {

using tnkit::Index;
using tnkit::Matrix;
using tnkit::Scalar;
using tnkit::Vector;

inline Vector flat(const tnkit::DenseTensor& t) {
  return Eigen::Map<const Vector>(t.ptr(), static_cast<Eigen::Index>(t.size()));
}

// Kronecker product with `a` acting on the slower index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Operator acting with `op` on `site` of n sites (site 0 fastest).
inline Matrix embed(const Matrix& op, Index site, Index n, Index d = 2) {
  Matrix out = Matrix::Identity(1, 1);
  for (Index k = n; k-- > 0;) out = kron(out, k == site ? op : Matrix::Identity(d, d));
  return out;
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// J sum Z_i Z_{i+1} - hz sum Z_i - hx sum X_i on an open chain.
inline Matrix tfi_hamiltonian(Index n, double j, double hz, double hx) {
  const Index dim = Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  auto spin = [](Index s, Index q) { return ((s >> q) & 1) ? -1.0 : 1.0; };
  for (Index s = 0; s < dim; ++s) {
    for (Index i = 0; i < n; ++i) {
      h(s, s) -= hz * spin(s, i);
      h(s ^ (Index{1} << i), s) -= hx;
      if (i + 1 < n) h(s, s) += j * spin(s, i) * spin(s, i + 1);
    }
  }
  return h;
}

inline double ground_energy(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Ground energy of the zero-longitudinal-field chain from its free-fermion
// spectrum: E0 = -1/2 sum of the positive eigenvalues of the Majorana
// hopping matrix.
inline double tfi_free_fermion_energy(Index n, double j, double hx) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Index q = 0; q < n; ++q) {
    a(2 * q, 2 * q + 1) = 2 * hx;
    if (q + 1 < n) a(2 * q + 1, 2 * q + 2) = 2 * j;
  }
  Eigen::MatrixXd anti = a - a.transpose();
  Eigen::MatrixXcd herm = std::complex<double>(0, 1) * anti.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  double e = 0;
  for (Eigen::Index q = 0; q < es.eigenvalues().size(); ++q)
    if (es.eigenvalues()(q) > 0) e -= 0.5 * es.eigenvalues()(q);
  return e;
}

inline Matrix expm_hermitian(const Matrix& h, Scalar factor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector ev = (factor * es.eigenvalues().cast<Scalar>()).array().exp();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace oracle
