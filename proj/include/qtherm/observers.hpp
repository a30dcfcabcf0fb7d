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

// Observer-relative descriptions of the lab.
//
// An observer is given by a table sending each lab basis ket to a ket of
// the observer's (smaller or equal) description space. Rows are grouped
// into sectors whose observer images are orthonormal, and each sector
// becomes an isometry V_k. The coarse-graining channel is
//
//   rho -> sum_k V_k rho V_k†
//
// which is trace preserving because the lab kets form a basis. Coherences
// between different sectors are dropped.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qtherm/errors.hpp"
#include "qtherm/linalg.hpp"
#include "qtherm/quantum.hpp"
#include "qtherm/thermo.hpp"

namespace qtherm {

struct TableRow {
  Ket lab;
  Ket observed;
};

/// Rows of one isometry V = sum_r |observed_r><lab_r|.
struct Sector {
  std::vector<TableRow> rows;
};

class Observer {
 public:
  Observer(std::string name, std::size_t lab_dim, std::size_t obs_dim, std::vector<Sector> sectors)
      : name_(std::move(name)), lab_dim_(lab_dim), obs_dim_(obs_dim), sectors_(std::move(sectors)) {}

  const std::string& name() const { return name_; }
  std::size_t lab_dim() const { return lab_dim_; }
  std::size_t obs_dim() const { return obs_dim_; }
  const std::vector<Sector>& sectors() const { return sectors_; }

  /// sum_k V_k m V_k† for an arbitrary lab-space matrix.
  ComplexMatrix apply(const ComplexMatrix& m) const {
    detail::require_same_dim(m.dim(), lab_dim_, "coarse_grain");
    ComplexMatrix out(obs_dim_);
    for (const auto& sector : sectors_) {
      for (const auto& r : sector.rows) {
        for (const auto& s : sector.rows) {
          // <lab_r| m |lab_s>
          Complex elem = 0.0;
          for (std::size_t i = 0; i < lab_dim_; ++i)
            for (std::size_t j = 0; j < lab_dim_; ++j)
              elem += std::conj(r.lab[i]) * m(i, j) * s.lab[j];
          if (elem == 0.0) continue;
          out += outer(r.observed, s.observed) * elem;
        }
      }
    }
    return out;
  }

  /// Observer basis with its image in every sector; needs every sector to
  /// span the whole observer space.
  Embedding embedding() const {
    for (const auto& sector : sectors_) {
      if (sector.rows.size() != obs_dim_) {
        throw EmbeddingError("observer '" + name_ + "' has a sector that does not span its space");
      }
    }
    Embedding out;
    for (const auto& basis_row : sectors_.front().rows) {
      const Ket& o = basis_row.observed;
      std::vector<Ket> images;
      for (const auto& sector : sectors_) {
        std::vector<Complex> v(lab_dim_);
        for (const auto& r : sector.rows) {
          const Complex c = inner(r.observed, o);
          for (std::size_t i = 0; i < lab_dim_; ++i) v[i] += c * r.lab[i];
        }
        images.emplace_back(std::move(v));
      }
      out.push_back({o, std::move(images)});
    }
    return out;
  }

 private:
  std::string name_;
  std::size_t lab_dim_;
  std::size_t obs_dim_;
  std::vector<Sector> sectors_;
};

/// Groups table rows first-fit into sectors with orthonormal observer images.
inline Observer build_observer(std::string name, std::vector<TableRow> table,
                               std::size_t obs_dim) {
  if (table.empty()) throw BasisError("observer '" + name + "' has an empty table");
  detail::check_dim(obs_dim);
  const std::size_t lab_dim = table.front().lab.dim();
  std::vector<Ket> lab_kets;
  for (const auto& row : table) {
    if (row.lab.dim() != lab_dim) throw BasisError("observer table lab kets differ in dimension");
    if (row.observed.dim() != obs_dim) {
      throw SectorError("observer table image has dimension " +
                        std::to_string(row.observed.dim()) + ", expected " +
                        std::to_string(obs_dim));
    }
    lab_kets.push_back(row.lab);
  }
  if (table.size() != lab_dim || !orthonormal(lab_kets)) {
    throw BasisError("observer '" + name + "' table lab kets are not an orthonormal basis");
  }

  std::vector<Sector> sectors;
  for (auto& row : table) {
    auto fits = [&](const Sector& s) {
      return std::all_of(s.rows.begin(), s.rows.end(), [&](const TableRow& r) {
        return std::abs(inner(r.observed, row.observed)) <= 1e-10;
      });
    };
    auto it = std::find_if(sectors.begin(), sectors.end(), fits);
    if (it == sectors.end()) {
      sectors.push_back(Sector{{std::move(row)}});
    } else {
      it->rows.push_back(std::move(row));
    }
  }

  // sum_k V_k† V_k = I
  ComplexMatrix sum(lab_dim);
  for (const auto& s : sectors)
    for (const auto& r : s.rows)
      for (const auto& q : s.rows) sum += outer(r.lab, q.lab) * inner(r.observed, q.observed);
  if (max_abs_diff(sum, ComplexMatrix::identity(lab_dim)) > 1e-10) {
    throw SectorError("observer '" + name + "' is not trace preserving");
  }
  return Observer(std::move(name), lab_dim, obs_dim, std::move(sectors));
}

inline Observer identity_observer(std::string name, std::size_t dim) {
  std::vector<TableRow> table;
  for (std::size_t i = 0; i < dim; ++i) table.push_back({Ket::basis(dim, i), Ket::basis(dim, i)});
  return build_observer(std::move(name), std::move(table), dim);
}

inline StatisticalMatrix coarse_grain(const Observer& obs, const StatisticalMatrix& rho) {
  return StatisticalMatrix(obs.apply(rho.matrix()).hermitian_part(), rho.label());
}

struct ChamberView {
  std::string name;
  double volume = 0.0;
  double moles = 0.0;
  /// Coarse-grained aggregate; absent for an empty chamber.
  std::optional<ComplexMatrix> state;
  std::vector<WeightedState> mixture;
};

struct ObserverView {
  std::string observer;
  std::vector<ChamberView> chambers;
};

inline ObserverView view(const Observer& obs, const LabState& lab) {
  detail::require_same_dim(obs.lab_dim(), lab.lab_dim, "view");
  ObserverView out{obs.name(), {}};
  for (const auto& c : lab.chambers) {
    ChamberView cv{c.name, c.volume, c.total_moles(), std::nullopt, {}};
    if (!c.contents.empty()) {
      ComplexMatrix seen = obs.apply(c.aggregate()).hermitian_part();
      cv.mixture = spectral_mixture(seen);
      cv.state = std::move(seen);
    }
    out.chambers.push_back(std::move(cv));
  }
  return out;
}

/// Name of the first chamber (in `a`'s order) that the observer can tell
/// apart between the two lab states, or nullopt when they look the same.
inline std::optional<std::string> first_difference(const Observer& obs, const LabState& a,
                                                   const LabState& b, double tol) {
  std::set<std::string> na, nb;
  for (const auto& c : a.chambers) na.insert(c.name);
  for (const auto& c : b.chambers) nb.insert(c.name);
  if (na != nb) throw ShapeError("lab states have different chamber sets");

  const ObserverView va = view(obs, a);
  const ObserverView vb = view(obs, b);
  for (const auto& ca : va.chambers) {
    const auto& cb = *std::find_if(vb.chambers.begin(), vb.chambers.end(),
                                   [&](const ChamberView& c) { return c.name == ca.name; });
    if (std::abs(ca.volume - cb.volume) > tol || std::abs(ca.moles - cb.moles) > tol)
      return ca.name;
    if (ca.state.has_value() != cb.state.has_value()) return ca.name;
    if (ca.state && max_abs_diff(*ca.state, *cb.state) > tol) return ca.name;
  }
  return std::nullopt;
}

inline bool states_equivalent(const Observer& obs, const LabState& a, const LabState& b,
                              double tol = 1e-9) {
  return !first_difference(obs, a, b, tol).has_value();
}

}  // namespace qtherm
