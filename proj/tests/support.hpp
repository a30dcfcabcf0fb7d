// Copyright 2026 The qtherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Random generators and reference computations shared by the tests. The
// reference side goes through Eigen so that expected values do not depend
// on the code under test.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "qtherm/linalg.hpp"
#include "qtherm/quantum.hpp"

namespace qtherm::testing {

using Rng = std::mt19937_64;

inline Complex random_complex(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd out(m.dim(), m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) out(r, c) = m(r, c);
  return out;
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
  ComplexMatrix out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
  return out;
}

inline ComplexMatrix random_matrix(std::size_t dim, Rng& rng) {
  ComplexMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = random_complex(rng);
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t dim, Rng& rng) {
  return random_matrix(dim, rng).hermitian_part();
}

/// Ginibre state G G† / tr(G G†); full rank with probability one.
inline StatisticalMatrix random_state(std::size_t dim, Rng& rng) {
  const ComplexMatrix g = random_matrix(dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  return StatisticalMatrix(rho.hermitian_part());
}

inline Ket random_ket(std::size_t dim, Rng& rng) {
  std::vector<Complex> v(dim);
  for (auto& x : v) x = random_complex(rng);
  return Ket(std::move(v));
}

/// Haar-ish unitary from the QR decomposition of a Ginibre matrix.
inline ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
  const Eigen::MatrixXcd g = to_eigen(random_matrix(dim, rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  return from_eigen(qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim));
}

/// Random POVM with `count` operators: A_i = B_i S^{-1/2}, S = sum B_i† B_i.
inline Povm random_povm(std::size_t dim, std::size_t count, Rng& rng) {
  std::vector<Eigen::MatrixXcd> b;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < count; ++i) {
    b.push_back(to_eigen(random_matrix(dim, rng)));
    s += b.back().adjoint() * b.back();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
  const Eigen::MatrixXcd inv_sqrt = es.operatorInverseSqrt();
  std::vector<ComplexMatrix> effects;
  for (const auto& bi : b) effects.push_back(from_eigen(bi * inv_sqrt));
  return Povm(std::move(effects));
}

/// Ascending eigenvalues from Eigen.
inline std::vector<double> reference_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m));
  const auto& v = es.eigenvalues();
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline bool positive_semidefinite(const ComplexMatrix& m, double tol) {
  for (double v : reference_eigenvalues(m.hermitian_part()))
    if (v < -tol) return false;
  return true;
}

}  // namespace qtherm::testing
