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

// Statistical (density) matrices, POVMs with their outcome updates, and the
// eigenbasis separation measurement for gas mixtures.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtherm/errors.hpp"
#include "qtherm/linalg.hpp"

namespace qtherm {

/// Trace-one positive Hermitian matrix.
class StatisticalMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kPositivityTol = 1e-10;

  explicit StatisticalMatrix(ComplexMatrix m, std::string label = {})
      : matrix_(std::move(m)), label_(std::move(label)) {
    if (!matrix_.is_hermitian(kHermitianTol)) {
      throw StateError("statistical matrix is not Hermitian");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - Complex(1.0)) > kTraceTol) {
      throw StateError("statistical matrix trace is " + std::to_string(tr.real()) +
                       ", expected 1");
    }
    for (const auto& e : hermitian_eig(matrix_)) {
      if (e.value < -kPositivityTol) {
        throw StateError("statistical matrix has negative eigenvalue " +
                         std::to_string(e.value));
      }
    }
  }

  static StatisticalMatrix pure(const Ket& k, std::string label = {}) {
    return StatisticalMatrix(k.projector(), std::move(label));
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return matrix_.dim(); }
  const std::string& label() const { return label_; }

 private:
  ComplexMatrix matrix_;
  std::string label_;
};

/// Measurement given by operators A_i acting as rho -> A_i rho A_i†.
class Povm {
 public:
  static constexpr double kCompletenessTol = 1e-10;

  explicit Povm(std::vector<ComplexMatrix> effects, std::vector<std::string> labels = {})
      : effects_(std::move(effects)), labels_(std::move(labels)) {
    if (effects_.empty()) throw PovmError("POVM has no effects");
    const std::size_t n = effects_.front().dim();
    ComplexMatrix sum(n);
    for (const auto& a : effects_) {
      if (a.dim() != n) throw PovmError("POVM effects have different dimensions");
      sum += a.adjoint() * a;
    }
    const double err = max_abs_diff(sum, ComplexMatrix::identity(n));
    if (err > kCompletenessTol) {
      throw PovmError("POVM is not complete: |sum A†A - I| = " + std::to_string(err));
    }
    if (labels_.empty()) {
      for (std::size_t i = 0; i < effects_.size(); ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != effects_.size()) {
      throw PovmError("POVM label count does not match effect count");
    }
  }

  /// One rank-one projector per ket.
  static Povm projective(std::span<const Ket> kets, std::vector<std::string> labels = {}) {
    std::vector<ComplexMatrix> effects;
    for (const auto& k : kets) effects.push_back(k.projector());
    return Povm(std::move(effects), std::move(labels));
  }

  /// One projector per group, each the sum of |k><k| over the group's kets.
  static Povm from_projector_groups(std::span<const std::vector<Ket>> groups,
                                    std::vector<std::string> labels = {}) {
    std::vector<ComplexMatrix> effects;
    for (const auto& g : groups) {
      if (g.empty()) throw PovmError("empty projector group");
      if (!orthonormal(g)) throw PovmError("projector group kets are not orthonormal");
      ComplexMatrix p(g.front().dim());
      for (const auto& k : g) {
        if (k.dim() != p.dim()) throw PovmError("projector group kets differ in dimension");
        p += k.projector();
      }
      effects.push_back(std::move(p));
    }
    return Povm(std::move(effects), std::move(labels));
  }

  static Povm identity(std::size_t dim) { return Povm({ComplexMatrix::identity(dim)}); }

  std::size_t dim() const { return effects_.front().dim(); }
  std::size_t size() const { return effects_.size(); }
  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<ComplexMatrix> effects_;
  std::vector<std::string> labels_;
};

struct OutcomeResult {
  double probability;
  /// Empty when the outcome has probability below kNegligibleProbability.
  std::optional<StatisticalMatrix> post_state;
};

inline constexpr double kNegligibleProbability = 1e-12;

inline std::vector<OutcomeResult> measure(const Povm& povm, const StatisticalMatrix& rho) {
  detail::require_same_dim(povm.dim(), rho.dim(), "measure");
  std::vector<OutcomeResult> out;
  double total = 0.0;
  for (const auto& a : povm.effects()) {
    ComplexMatrix unnormalized = conjugate(a, rho.matrix()).hermitian_part();
    double p = unnormalized.trace().real();
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    total += p;
    if (p < kNegligibleProbability) {
      out.push_back({p, std::nullopt});
    } else {
      unnormalized *= 1.0 / p;
      out.push_back({p, StatisticalMatrix(std::move(unnormalized), rho.label())});
    }
  }
  if (std::abs(total - 1.0) > Povm::kCompletenessTol) {
    throw PovmError("outcome probabilities sum to " + std::to_string(total));
  }
  return out;
}

inline bool are_orthogonal(const StatisticalMatrix& a, const StatisticalMatrix& b,
                           double tol = 1e-10) {
  return std::abs(trace_product(a.matrix(), b.matrix())) <= tol;
}

struct WeightedState {
  double weight;
  StatisticalMatrix state;
};

/// sum_i w_i rho_i
inline ComplexMatrix aggregate(std::span<const WeightedState> components) {
  if (components.empty()) throw WeightError("aggregate of an empty mixture");
  ComplexMatrix lambda(components.front().state.dim());
  for (const auto& c : components) {
    detail::require_same_dim(lambda.dim(), c.state.dim(), "aggregate");
    lambda += c.state.matrix() * Complex(c.weight);
  }
  return lambda;
}

/// Eigen-mixture of a positive trace-one matrix: (eigenvalue, eigenprojector)
/// pairs in eigensolver order, terms with weight <= drop removed.
inline std::vector<WeightedState> spectral_mixture(const ComplexMatrix& lambda,
                                                   double drop = kNegligibleProbability) {
  std::vector<WeightedState> out;
  for (auto& e : hermitian_eig(lambda)) {
    if (e.value <= drop) continue;
    out.push_back({e.value, StatisticalMatrix::pure(e.vector)});
  }
  return out;
}

inline void check_weights(std::span<const WeightedState> components) {
  if (components.empty()) throw WeightError("no mixture components");
  double sum = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw WeightError("mixture weights must be positive");
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw WeightError("mixture weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

/// Projective measurement onto the eigenbasis of the aggregate sum_i w_i rho_i,
/// effects ordered by descending eigenvalue.
inline Povm optimal_separation_povm(std::span<const WeightedState> components) {
  check_weights(components);
  const ComplexMatrix lambda = aggregate(components);
  std::vector<Ket> basis;
  std::vector<std::string> labels;
  for (auto& e : hermitian_eig(lambda)) {
    labels.push_back("eig" + std::to_string(basis.size()));
    basis.push_back(std::move(e.vector));
  }
  return Povm::projective(basis, std::move(labels));
}

/// Observer basis ket together with its image in each lab sector.
struct EmbeddingRow {
  Ket observer_ket;
  std::vector<Ket> lab_kets;
};
using Embedding = std::vector<EmbeddingRow>;

/// Lifts a POVM from the observer space to the lab space. Each operator A
/// becomes sum_k W_k A W_k†, where W_k sends observer row j to its k-th
/// lab image.
inline Povm lift_povm(const Povm& povm, const Embedding& embedding) {
  const std::size_t obs_dim = povm.dim();
  if (embedding.size() != obs_dim) {
    throw EmbeddingError("embedding has " + std::to_string(embedding.size()) +
                         " rows but the observer space has dimension " +
                         std::to_string(obs_dim));
  }
  std::vector<Ket> obs_kets;
  for (const auto& row : embedding) {
    if (row.observer_ket.dim() != obs_dim) {
      throw EmbeddingError("embedding observer ket has the wrong dimension");
    }
    obs_kets.push_back(row.observer_ket);
  }
  if (!orthonormal(obs_kets)) {
    throw EmbeddingError("embedding observer kets do not form an orthonormal basis");
  }
  const std::size_t sectors = embedding.front().lab_kets.size();
  if (sectors == 0) throw EmbeddingError("embedding row has no lab images");
  const std::size_t lab_dim = embedding.front().lab_kets.front().dim();
  std::vector<Ket> all_lab;
  for (const auto& row : embedding) {
    if (row.lab_kets.size() != sectors) {
      throw EmbeddingError("embedding rows have differing sector counts");
    }
    for (const auto& k : row.lab_kets) {
      if (k.dim() != lab_dim) throw EmbeddingError("embedding lab kets differ in dimension");
      all_lab.push_back(k);
    }
  }
  if (!orthonormal(all_lab)) {
    throw EmbeddingError("embedding lab images are not orthonormal");
  }

  std::vector<ComplexMatrix> lifted;
  for (const auto& a : povm.effects()) {
    ComplexMatrix out(lab_dim);
    for (std::size_t j = 0; j < obs_dim; ++j) {
      for (std::size_t jp = 0; jp < obs_dim; ++jp) {
        // <o_j|A|o_j'>
        Complex elem = 0.0;
        const Ket& oj = obs_kets[j];
        const Ket& ojp = obs_kets[jp];
        for (std::size_t r = 0; r < obs_dim; ++r)
          for (std::size_t c = 0; c < obs_dim; ++c) elem += std::conj(oj[r]) * a(r, c) * ojp[c];
        if (elem == 0.0) continue;
        for (std::size_t k = 0; k < sectors; ++k)
          out += outer(embedding[j].lab_kets[k], embedding[jp].lab_kets[k]) * elem;
      }
    }
    lifted.push_back(std::move(out));
  }
  try {
    return Povm(std::move(lifted), povm.labels());
  } catch (const PovmError& e) {
    throw EmbeddingError(std::string("lifted POVM is not complete on the lab space: ") +
                         e.what());
  }
}

}  // namespace qtherm
