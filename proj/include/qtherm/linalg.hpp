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

// Small dense complex matrices (dimension 1..8) and a deterministic
// Hermitian eigensolver based on cyclic Jacobi rotations.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qtherm/errors.hpp"

namespace qtherm {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDim = 8;

namespace detail {

inline void check_dim(std::size_t dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw DimensionError("dimension " + std::to_string(dim) +
                         " outside the supported range 1.." +
                         std::to_string(kMaxDim));
  }
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

/// Square complex matrix stored row-major.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    detail::check_dim(dim);
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
      : ComplexMatrix(rows.size()) {
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != dim_) {
        throw DimensionError("matrix literal is not square");
      }
      std::size_t c = 0;
      for (const auto& v : row) data_[r * dim_ + c++] = v;
      ++r;
    }
  }

  ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
      : dim_(dim), data_(std::move(entries)) {
    detail::check_dim(dim);
    if (data_.size() != dim * dim) {
      throw DimensionError("expected " + std::to_string(dim * dim) +
                           " entries, got " + std::to_string(data_.size()));
    }
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  std::size_t dim() const { return dim_; }
  std::span<const Complex> entries() const { return data_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  /// (M + M†)/2
  ComplexMatrix hermitian_part() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        out(r, c) = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
    return out;
  }

  bool is_hermitian(double tol) const {
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = r; c < dim_; ++c)
        if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
    return true;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    detail::require_same_dim(dim_, o.dim_, "matrix sum");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    detail::require_same_dim(dim_, o.dim_, "matrix difference");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  ComplexMatrix& operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_dim(a.dim_, b.dim_, "matrix product");
    const std::size_t n = a.dim_;
    ComplexMatrix out(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex ark = a(r, k);
        if (ark == 0.0) continue;
        for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
      }
    return out;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_;
  std::vector<Complex> data_;
};

/// Largest entrywise |a - b|.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_dim(a.dim(), b.dim(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

/// Unit vector. Amplitudes are normalized on construction.
class Ket {
 public:
  explicit Ket(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
    detail::check_dim(amps_.size());
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    if (!(n2 > 1e-24) || !std::isfinite(n2)) {
      throw DomainError("cannot normalize a zero or non-finite vector");
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amps_) a *= inv;
    double check = 0.0;
    for (const auto& a : amps_) check += std::norm(a);
    if (std::abs(std::sqrt(check) - 1.0) > 1e-12) {
      throw DomainError("ket normalization failed");
    }
  }

  Ket(std::initializer_list<Complex> amplitudes)
      : Ket(std::vector<Complex>(amplitudes)) {}

  static Ket basis(std::size_t dim, std::size_t index) {
    std::vector<Complex> v(dim);
    v.at(index) = 1.0;
    return Ket(std::move(v));
  }

  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  /// |k><k|
  ComplexMatrix projector() const {
    ComplexMatrix p(dim());
    for (std::size_t r = 0; r < dim(); ++r)
      for (std::size_t c = 0; c < dim(); ++c) p(r, c) = amps_[r] * std::conj(amps_[c]);
    return p;
  }

  friend bool operator==(const Ket&, const Ket&) = default;

 private:
  std::vector<Complex> amps_;
};

/// <a|b>
inline Complex inner(const Ket& a, const Ket& b) {
  detail::require_same_dim(a.dim(), b.dim(), "inner product");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// |a><b|
inline ComplexMatrix outer(const Ket& a, const Ket& b) {
  detail::require_same_dim(a.dim(), b.dim(), "outer product");
  ComplexMatrix m(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) m(r, c) = a[r] * std::conj(b[c]);
  return m;
}

/// True when the kets are pairwise orthogonal to within tol.
inline bool orthonormal(std::span<const Ket> kets, double tol = 1e-10) {
  for (std::size_t i = 0; i < kets.size(); ++i)
    for (std::size_t j = i + 1; j < kets.size(); ++j) {
      if (kets[i].dim() != kets[j].dim()) return false;
      if (std::abs(inner(kets[i], kets[j])) > tol) return false;
    }
  return true;
}

/// Extends an orthonormal set to a full basis by Gram-Schmidt over the
/// canonical basis vectors, in index order. Returns only the added kets.
inline std::vector<Ket> complete_basis(std::span<const Ket> kets, std::size_t dim) {
  std::vector<std::vector<Complex>> basis;
  for (const auto& k : kets) basis.emplace_back(k.amplitudes().begin(), k.amplitudes().end());
  std::vector<Ket> added;
  for (std::size_t e = 0; e < dim && basis.size() < dim; ++e) {
    std::vector<Complex> v(dim);
    v[e] = 1.0;
    // two passes of modified Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < dim; ++i) proj += std::conj(b[i]) * v[i];
        for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * b[i];
      }
    }
    double n2 = 0.0;
    for (const auto& a : v) n2 += std::norm(a);
    if (n2 < 1e-12) continue;
    Ket k(v);
    basis.emplace_back(k.amplitudes().begin(), k.amplitudes().end());
    added.push_back(std::move(k));
  }
  return added;
}

/// tr(a·b)
inline Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_dim(a.dim(), b.dim(), "trace_product");
  Complex t = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t k = 0; k < a.dim(); ++k) t += a(r, k) * b(k, r);
  return t;
}

/// a·rho·a†
inline ComplexMatrix conjugate(const ComplexMatrix& a, const ComplexMatrix& rho) {
  detail::require_same_dim(a.dim(), rho.dim(), "conjugate");
  return a * rho * a.adjoint();
}

struct EigenPair {
  double value;
  Ket vector;
};

namespace detail {

inline constexpr double kJacobiOffDiagonal = 1e-13;
inline constexpr double kTieTolerance = 1e-10;
inline constexpr double kPhaseCutoff = 1e-10;
inline constexpr int kMaxSweeps = 100;

// First component with magnitude above the cutoff becomes real positive.
inline std::vector<Complex> fix_phase(std::vector<Complex> v) {
  for (const auto& a : v) {
    if (std::abs(a) > kPhaseCutoff) {
      const Complex rot = std::conj(a) / std::abs(a);
      for (auto& x : v) x *= rot;
      break;
    }
  }
  return v;
}

// Lexicographic on (re, im) of each component, larger first.
inline bool lex_greater(const Ket& a, const Ket& b) {
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() > b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() > b[i].imag();
  }
  return false;
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Eigenvalues come out in descending order. Within a group of eigenvalues
/// equal to 1e-10 the eigenvectors are ordered lexicographically by the
/// (real, imaginary) parts of their components, largest first. Each
/// eigenvector has its first non-negligible component real and positive.
inline std::vector<EigenPair> hermitian_eig(const ComplexMatrix& m, double tol = 1e-12) {
  if (!m.is_hermitian(tol)) {
    throw NotHermitianError("hermitian_eig: input is not Hermitian within " +
                            std::to_string(tol));
  }
  const std::size_t n = m.dim();
  ComplexMatrix a = m.hermitian_part();
  ComplexMatrix v = ComplexMatrix::identity(n);
  // Scale-aware floor so large-norm inputs still terminate.
  const double threshold =
      std::max(detail::kJacobiOffDiagonal,
               8.0 * std::numeric_limits<double>::epsilon() * a.frobenius_norm());

  auto off_diagonal_max = [&] {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    return off;
  };

  int sweep = 0;
  for (; sweep < detail::kMaxSweeps && off_diagonal_max() >= threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;

        // Make a(p,q) real: scale column q by conj(phase), row q by phase.
        const Complex phase = a(p, q) / r;
        for (std::size_t k = 0; k < n; ++k) {
          a(k, q) *= std::conj(phase);
          v(k, q) *= std::conj(phase);
        }
        for (std::size_t k = 0; k < n; ++k) a(q, k) *= phase;

        // Real Givens rotation zeroing a(p,q).
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (off_diagonal_max() >= threshold) {
    throw NotHermitianError("hermitian_eig: Jacobi iteration did not converge");
  }

  std::vector<EigenPair> pairs;
  pairs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Complex> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, j);
    pairs.push_back({a(j, j).real(), Ket(detail::fix_phase(std::move(col)))});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& x, const EigenPair& y) { return x.value > y.value; });
  for (std::size_t lo = 0; lo < pairs.size();) {
    std::size_t hi = lo + 1;
    while (hi < pairs.size() && pairs[lo].value - pairs[hi].value <= detail::kTieTolerance) ++hi;
    std::sort(pairs.begin() + static_cast<std::ptrdiff_t>(lo),
              pairs.begin() + static_cast<std::ptrdiff_t>(hi),
              [](const EigenPair& x, const EigenPair& y) {
                return detail::lex_greater(x.vector, y.vector);
              });
    lo = hi;
  }
  return pairs;
}

}  // namespace qtherm
