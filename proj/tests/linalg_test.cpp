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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtherm/linalg.hpp"
#include "support.hpp"

namespace qtherm {
namespace {

using testing::Rng;

TEST(ComplexMatrix, ArithmeticAndAdjoint) {
  const ComplexMatrix a{{1.0, Complex(0, 2)}, {3.0, 4.0}};
  const ComplexMatrix b{{0.0, 1.0}, {1.0, 0.0}};
  const ComplexMatrix ab = a * b;
  EXPECT_EQ(ab(0, 0), Complex(0, 2));
  EXPECT_EQ(ab(0, 1), Complex(1, 0));
  EXPECT_EQ(ab(1, 0), Complex(4, 0));
  EXPECT_EQ(ab(1, 1), Complex(3, 0));
  EXPECT_EQ(a.adjoint()(1, 0), Complex(0, -2));
  EXPECT_EQ(a.trace(), Complex(5, 0));
  EXPECT_FALSE(a.is_hermitian(1e-12));
  EXPECT_TRUE(a.hermitian_part().is_hermitian(1e-15));
  EXPECT_DOUBLE_EQ((a - a).frobenius_norm(), 0.0);
}

TEST(ComplexMatrix, RejectsBadDimensions) {
  EXPECT_THROW(ComplexMatrix(0), DimensionError);
  EXPECT_THROW(ComplexMatrix(9), DimensionError);
  EXPECT_THROW((ComplexMatrix{{1.0, 2.0}, {3.0}}), DimensionError);
  EXPECT_THROW(ComplexMatrix(2) * ComplexMatrix(3), DimensionError);
}

TEST(Ket, NormalizesAndRejectsZero) {
  const Ket k{3.0, 4.0};
  EXPECT_NEAR(k[0].real(), 0.6, 1e-15);
  EXPECT_NEAR(k[1].real(), 0.8, 1e-15);
  EXPECT_THROW((Ket{0.0, 0.0}), DomainError);
  EXPECT_NEAR(std::abs(inner(k, k)), 1.0, 1e-15);
}

TEST(Ket, CompleteBasisFillsTheSpace) {
  const Ket x{1.0, 1.0, 0.0};
  const std::vector<Ket> start{x};
  auto rest = complete_basis(start, 3);
  ASSERT_EQ(rest.size(), 2u);
  std::vector<Ket> all{x};
  all.insert(all.end(), rest.begin(), rest.end());
  EXPECT_TRUE(orthonormal(all));
}

TEST(HermitianEig, PauliX) {
  const ComplexMatrix sx{{0.0, 1.0}, {1.0, 0.0}};
  const auto eig = hermitian_eig(sx);
  ASSERT_EQ(eig.size(), 2u);
  EXPECT_NEAR(eig[0].value, 1.0, 1e-14);
  EXPECT_NEAR(eig[1].value, -1.0, 1e-14);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(eig[0].vector[0].real(), h, 1e-12);
  EXPECT_NEAR(eig[0].vector[1].real(), h, 1e-12);
  EXPECT_NEAR(eig[1].vector[0].real(), h, 1e-12);
  EXPECT_NEAR(eig[1].vector[1].real(), -h, 1e-12);
}

TEST(HermitianEig, MixtureOfZAndX) {
  // lambda = (|z+><z+| + |x+><x+|)/2 = [[3,1],[1,1]]/4
  const ComplexMatrix lambda{{0.75, 0.25}, {0.25, 0.25}};
  const auto eig = hermitian_eig(lambda);
  EXPECT_NEAR(eig[0].value, (2.0 + std::sqrt(2.0)) / 4.0, 1e-12);
  EXPECT_NEAR(eig[1].value, (2.0 - std::sqrt(2.0)) / 4.0, 1e-12);
  const double c = std::cos(M_PI / 8), s = std::sin(M_PI / 8);
  EXPECT_NEAR(eig[0].vector[0].real(), c, 1e-10);
  EXPECT_NEAR(eig[0].vector[1].real(), s, 1e-10);
  // First non-negligible component is made positive: -alpha_minus.
  EXPECT_NEAR(eig[1].vector[0].real(), s, 1e-10);
  EXPECT_NEAR(eig[1].vector[1].real(), -c, 1e-10);
}

TEST(HermitianEig, DegenerateSpectrumIsOrderedDeterministically) {
  const auto eig = hermitian_eig(ComplexMatrix::identity(3));
  for (const auto& e : eig) EXPECT_NEAR(e.value, 1.0, 1e-15);
  EXPECT_EQ(eig[0].vector, Ket::basis(3, 0));
  EXPECT_EQ(eig[1].vector, Ket::basis(3, 1));
  EXPECT_EQ(eig[2].vector, Ket::basis(3, 2));
}

TEST(HermitianEig, ComplexPhaseRule) {
  const ComplexMatrix sy{{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}};
  for (const auto& e : hermitian_eig(sy)) {
    EXPECT_GT(e.vector[0].real(), 0.0);
    EXPECT_NEAR(e.vector[0].imag(), 0.0, 1e-15);
  }
}

TEST(HermitianEig, RejectsNonHermitian) {
  const ComplexMatrix m{{0.0, 1.0}, {0.0, 0.0}};
  EXPECT_THROW(hermitian_eig(m), NotHermitianError);
}

TEST(HermitianEig, LargeNormStillConverges) {
  Rng rng(7);
  ComplexMatrix m = testing::random_hermitian(8, rng);
  m *= 1e9;
  EXPECT_NO_THROW(hermitian_eig(m));
}

// Eigenpairs reproduce the matrix and agree with an independent solver.
TEST(HermitianEigProperty, MatchesReferenceOnRandomMatrices) {
  Rng rng(20260101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const ComplexMatrix m = testing::random_hermitian(n, rng);
    const auto eig = hermitian_eig(m);
    auto ref = testing::reference_eigenvalues(m);
    std::reverse(ref.begin(), ref.end());
    ASSERT_EQ(eig.size(), n);
    ComplexMatrix rebuilt(n);
    std::vector<Ket> vecs;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(eig[i].value, ref[i], 1e-10) << "trial " << trial;
      if (i > 0) {
        EXPECT_GE(eig[i - 1].value, eig[i].value - 1e-12);
      }
      rebuilt += eig[i].vector.projector() * Complex(eig[i].value);
      vecs.push_back(eig[i].vector);
    }
    EXPECT_LT(max_abs_diff(rebuilt, m), 1e-10) << "trial " << trial;
    EXPECT_TRUE(orthonormal(vecs));
  }
}

TEST(HermitianEigProperty, DeterministicAcrossCalls) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix m = testing::random_hermitian(4, rng);
    const auto a = hermitian_eig(m);
    const auto b = hermitian_eig(m);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].value, b[i].value);
      EXPECT_EQ(a[i].vector, b[i].vector);
    }
  }
}

}  // namespace
}  // namespace qtherm
