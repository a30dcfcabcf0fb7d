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

// Chambers of quantum ideal gases, membrane operations, and the isothermal
// work/heat ledger. Units: R = 1, so heats are in units of nRT when n = T = 1.
//
// Every operation is a pure transition: it takes a LabState by const
// reference and returns the successor state plus the ledger event it
// produced. Heat absorbed by the gas always equals the work it does.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtherm/errors.hpp"
#include "qtherm/linalg.hpp"
#include "qtherm/quantum.hpp"

namespace qtherm {

/// Outcome fractions below this are dropped to avoid zero-volume chambers.
inline constexpr double kNegligibleFraction = 1e-12;
/// Post-measurement probabilities above this count as "passed" by a membrane.
inline constexpr double kDistinguishTol = 1e-9;
/// Components whose matrices agree entrywise to this are merged.
inline constexpr double kMergeTol = 1e-10;

struct GasComponent {
  StatisticalMatrix state;
  double moles;
};

struct Chamber {
  std::string name;
  double volume;
  std::vector<GasComponent> contents;

  double total_moles() const {
    double n = 0.0;
    for (const auto& c : contents) n += c.moles;
    return n;
  }

  /// Mole-weighted average statistical matrix.
  ComplexMatrix aggregate() const {
    if (contents.empty()) throw EmptyChamberError("chamber '" + name + "' is empty");
    const double n = total_moles();
    ComplexMatrix lambda(contents.front().state.dim());
    for (const auto& c : contents) lambda += c.state.matrix() * Complex(c.moles / n);
    return lambda;
  }
};

struct LabState {
  double temperature = 1.0;
  std::size_t lab_dim = 2;
  std::vector<Chamber> chambers;

  bool has(const std::string& name) const {
    return std::any_of(chambers.begin(), chambers.end(),
                       [&](const Chamber& c) { return c.name == name; });
  }

  const Chamber& chamber(const std::string& name) const {
    for (const auto& c : chambers)
      if (c.name == name) return c;
    throw NameError("unknown chamber '" + name + "'");
  }

  double total_moles() const {
    double n = 0.0;
    for (const auto& c : chambers) n += c.total_moles();
    return n;
  }
};

enum class EventKind { mix, separate, rotate, partition, join, checkpoint };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::mix: return "mix";
    case EventKind::separate: return "separate";
    case EventKind::rotate: return "rotate";
    case EventKind::partition: return "partition";
    case EventKind::join: return "join";
    case EventKind::checkpoint: return "checkpoint";
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(const std::string& s) {
  for (auto k : {EventKind::mix, EventKind::separate, EventKind::rotate, EventKind::partition,
                 EventKind::join, EventKind::checkpoint})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct LedgerEvent {
  int step_index = 0;
  EventKind kind = EventKind::checkpoint;
  double heat_absorbed_by_gas = 0.0;
  double work_done_by_gas = 0.0;
  std::string description;
};

inline LedgerEvent make_event(EventKind kind, double heat, std::string description) {
  // +0.0 normalizes a negative zero so records never print "-0"
  heat += 0.0;
  return LedgerEvent{0, kind, heat, heat, std::move(description)};
}

struct Checkpoint {
  LabState snapshot;
  /// Number of events recorded before the checkpoint event itself.
  std::size_t event_offset = 0;
  int step_index = 0;
};

/// Ordered event log plus labelled deep snapshots of the lab.
class Ledger {
 public:
  void append(LedgerEvent event) {
    if (event.heat_absorbed_by_gas != event.work_done_by_gas) {
      throw LedgerError("event violates Q == W: " + event.description);
    }
    if (!events_.empty() && event.step_index <= events_.back().step_index) {
      throw LedgerError("step index " + std::to_string(event.step_index) +
                        " is not after " + std::to_string(events_.back().step_index));
    }
    events_.push_back(std::move(event));
  }

  void checkpoint(const std::string& label, const LabState& lab, int step_index) {
    if (checkpoints_.count(label)) throw NameError("duplicate checkpoint '" + label + "'");
    Checkpoint cp{lab, events_.size(), step_index};
    append(LedgerEvent{step_index, EventKind::checkpoint, 0.0, 0.0, "checkpoint " + label});
    checkpoints_.emplace(label, std::move(cp));
  }

  const Checkpoint& checkpoint_at(const std::string& label) const {
    auto it = checkpoints_.find(label);
    if (it == checkpoints_.end()) throw NameError("unknown checkpoint '" + label + "'");
    return it->second;
  }

  /// Heat absorbed over all events after the checkpoint.
  double heat_since(const std::string& label) const {
    const auto& cp = checkpoint_at(label);
    double q = 0.0;
    for (std::size_t i = cp.event_offset; i < events_.size(); ++i)
      q += events_[i].heat_absorbed_by_gas;
    return q;
  }

  const std::vector<LedgerEvent>& events() const { return events_; }
  const std::map<std::string, Checkpoint>& checkpoints() const { return checkpoints_; }

 private:
  std::vector<LedgerEvent> events_;
  std::map<std::string, Checkpoint> checkpoints_;
};

struct Transition {
  LabState lab;
  LedgerEvent event;
};

/// W = n R T ln(Vf/Vi), R = 1.
inline double isothermal_work(double n, double t, double v_initial, double v_final) {
  if (!(n > 0.0) || !(t > 0.0) || !(v_initial > 0.0) || !(v_final > 0.0)) {
    throw DomainError("isothermal_work: all arguments must be positive");
  }
  return n * t * std::log(v_final / v_initial);
}

/// Merges components whose statistical matrices coincide, keeping first
/// appearance order.
inline std::vector<GasComponent> merge_components(std::vector<GasComponent> parts) {
  std::vector<GasComponent> out;
  for (auto& p : parts) {
    auto it = std::find_if(out.begin(), out.end(), [&](const GasComponent& q) {
      return max_abs_diff(q.state.matrix(), p.state.matrix()) <= kMergeTol;
    });
    if (it == out.end()) {
      out.push_back(std::move(p));
    } else {
      it->moles += p.moles;
    }
  }
  return out;
}

/// Eigen-mixture of the chamber's aggregate state.
inline std::vector<WeightedState> canonical_contents(const Chamber& chamber) {
  return spectral_mixture(chamber.aggregate());
}

namespace detail {

inline void validate_lab(const LabState& lab) {
  if (!(lab.temperature > 0.0)) throw DomainError("temperature must be positive");
  for (const auto& c : lab.chambers) {
    if (!(c.volume > 0.0)) throw DomainError("chamber '" + c.name + "' has non-positive volume");
    for (const auto& g : c.contents) {
      if (!(g.moles > 0.0)) throw DomainError("chamber '" + c.name + "' has non-positive moles");
      require_same_dim(g.state.dim(), lab.lab_dim, "chamber contents");
    }
  }
}

inline std::size_t index_of(const LabState& lab, const std::string& name) {
  for (std::size_t i = 0; i < lab.chambers.size(); ++i)
    if (lab.chambers[i].name == name) return i;
  throw NameError("unknown chamber '" + name + "'");
}

// New names must be distinct and not collide with chambers that survive.
inline void check_new_names(const LabState& lab, std::span<const std::string> consumed,
                            std::span<const std::string> produced) {
  for (std::size_t i = 0; i < produced.size(); ++i) {
    for (std::size_t j = i + 1; j < produced.size(); ++j)
      if (produced[i] == produced[j]) throw NameError("duplicate chamber name '" + produced[i] + "'");
    const bool freed =
        std::find(consumed.begin(), consumed.end(), produced[i]) != consumed.end();
    if (!freed && lab.has(produced[i])) {
      throw NameError("chamber '" + produced[i] + "' already exists");
    }
  }
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

/// Builds the unitary that sends each source ket to its image, completing
/// both sets to bases by Gram-Schmidt over the canonical basis.
inline ComplexMatrix unitary_from_mapping(std::span<const std::pair<Ket, Ket>> mapping,
                                          std::size_t dim) {
  std::vector<Ket> src, img;
  for (const auto& [s, t] : mapping) {
    detail::require_same_dim(s.dim(), dim, "rotation source");
    detail::require_same_dim(t.dim(), dim, "rotation image");
    src.push_back(s);
    img.push_back(t);
  }
  if (!orthonormal(src)) throw UnitaryError("rotation source kets are not orthonormal");
  if (!orthonormal(img)) throw UnitaryError("rotation image kets are not orthonormal");
  auto src_rest = complete_basis(src, dim);
  auto img_rest = complete_basis(img, dim);
  if (src.size() + src_rest.size() != dim || img.size() + img_rest.size() != dim ||
      src_rest.size() != img_rest.size()) {
    throw UnitaryError("rotation mapping cannot be completed to a unitary");
  }
  ComplexMatrix u(dim);
  for (std::size_t i = 0; i < src.size(); ++i) u += outer(img[i], src[i]);
  for (std::size_t i = 0; i < src_rest.size(); ++i) u += outer(img_rest[i], src_rest[i]);
  if (max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(dim)) > 1e-10) {
    throw UnitaryError("rotation mapping does not extend to a unitary");
  }
  return u;
}

/// Pushes the chamber's contents through a membrane pair realizing `povm`.
/// Outcome i collects, from each component (rho, n), the sub-component
/// (post_i, n p_i) and ends at equal pressure in volume f_i V, where f_i is
/// the outcome's mole fraction. Q = sum_i n_i T ln f_i <= 0.
inline Transition separate(const LabState& lab, const std::string& chamber, const Povm& povm,
                           std::vector<std::string> outcome_names = {}) {
  detail::validate_lab(lab);
  const std::size_t idx = detail::index_of(lab, chamber);
  const Chamber& src = lab.chambers[idx];
  detail::require_same_dim(povm.dim(), lab.lab_dim, "separate");
  if (src.contents.empty()) throw EmptyChamberError("chamber '" + chamber + "' is empty");
  if (outcome_names.empty()) {
    for (std::size_t i = 0; i < povm.size(); ++i)
      outcome_names.push_back(chamber + "." + std::to_string(i));
  }
  if (outcome_names.size() != povm.size()) {
    throw NameError("separate: " + std::to_string(povm.size()) + " outcomes but " +
                    std::to_string(outcome_names.size()) + " chamber names");
  }

  const double n_total = src.total_moles();
  std::vector<std::vector<GasComponent>> parts(povm.size());
  std::vector<double> moles(povm.size(), 0.0);
  for (const auto& comp : src.contents) {
    auto outcomes = measure(povm, comp.state);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (!outcomes[i].post_state) continue;
      const double n_i = comp.moles * outcomes[i].probability;
      moles[i] += n_i;
      parts[i].push_back({*outcomes[i].post_state, n_i});
    }
  }

  LabState next = lab;
  std::vector<Chamber> produced;
  std::vector<std::string> produced_names;
  double heat = 0.0;
  std::string desc = "separate " + chamber + " ->";
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const double f = moles[i] / n_total;
    if (f < kNegligibleFraction) continue;
    heat += moles[i] * lab.temperature * std::log(f);
    produced.push_back({outcome_names[i], f * src.volume, merge_components(std::move(parts[i]))});
    produced_names.push_back(outcome_names[i]);
    desc += " " + outcome_names[i] + "(" + detail::fmt(f) + ")";
  }
  const std::string consumed[] = {chamber};
  detail::check_new_names(lab, consumed, produced_names);
  next.chambers.erase(next.chambers.begin() + static_cast<std::ptrdiff_t>(idx));
  next.chambers.insert(next.chambers.begin() + static_cast<std::ptrdiff_t>(idx),
                       produced.begin(), produced.end());
  // Each log term is <= 0; guard against rounding above zero.
  heat = std::min(heat, 0.0);
  return {std::move(next), make_event(EventKind::separate, heat, desc)};
}

/// Reversibly mixes two chambers whose aggregates `povm` tells apart with
/// certainty. Q = sum_c n_c T ln((V_a + V_b)/V_c) >= 0.
inline Transition mix(const LabState& lab, const std::string& a, const std::string& b,
                      const Povm& povm, std::string into = {}) {
  detail::validate_lab(lab);
  if (a == b) throw NameError("cannot mix chamber '" + a + "' with itself");
  const std::size_t ia = detail::index_of(lab, a);
  const std::size_t ib = detail::index_of(lab, b);
  detail::require_same_dim(povm.dim(), lab.lab_dim, "mix");
  const Chamber& ca = lab.chambers[ia];
  const Chamber& cb = lab.chambers[ib];
  if (into.empty()) into = a;

  const StatisticalMatrix rho_a(ca.aggregate().hermitian_part());
  const StatisticalMatrix rho_b(cb.aggregate().hermitian_part());
  const auto pa = measure(povm, rho_a);
  const auto pb = measure(povm, rho_b);
  for (std::size_t i = 0; i < povm.size(); ++i) {
    if (pa[i].probability > kDistinguishTol && pb[i].probability > kDistinguishTol) {
      throw IndistinguishableError("membrane outcome '" + povm.labels()[i] + "' passes both '" +
                                   a + "' (p=" + detail::fmt(pa[i].probability) + ") and '" +
                                   b + "' (p=" + detail::fmt(pb[i].probability) + ")");
    }
  }

  const double v = ca.volume + cb.volume;
  const double heat = isothermal_work(ca.total_moles(), lab.temperature, ca.volume, v) +
                      isothermal_work(cb.total_moles(), lab.temperature, cb.volume, v);
  std::vector<GasComponent> merged = ca.contents;
  merged.insert(merged.end(), cb.contents.begin(), cb.contents.end());

  const std::string consumed[] = {a, b};
  const std::string produced[] = {into};
  detail::check_new_names(lab, consumed, produced);
  LabState next = lab;
  next.chambers[ia] = Chamber{into, v, merge_components(std::move(merged))};
  next.chambers.erase(next.chambers.begin() + static_cast<std::ptrdiff_t>(ib));
  return {std::move(next),
          make_event(EventKind::mix, heat, "mix " + a + " " + b + " -> " + into)};
}

/// Applies the unitary extending `mapping` to every component. No heat.
inline Transition rotate(const LabState& lab, const std::string& chamber,
                         std::span<const std::pair<Ket, Ket>> mapping) {
  detail::validate_lab(lab);
  const std::size_t idx = detail::index_of(lab, chamber);
  const ComplexMatrix u = unitary_from_mapping(mapping, lab.lab_dim);
  LabState next = lab;
  std::vector<GasComponent> rotated;
  for (const auto& c : lab.chambers[idx].contents) {
    rotated.push_back(
        {StatisticalMatrix(conjugate(u, c.state.matrix()).hermitian_part(), c.state.label()),
         c.moles});
  }
  next.chambers[idx].contents = merge_components(std::move(rotated));
  return {std::move(next), make_event(EventKind::rotate, 0.0, "rotate " + chamber)};
}

/// Inserts an impermeable wall at `fraction` of the volume. No heat.
inline Transition partition(const LabState& lab, const std::string& chamber, double fraction,
                            std::string first = {}, std::string second = {}) {
  detail::validate_lab(lab);
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("partition fraction must lie strictly between 0 and 1");
  }
  const std::size_t idx = detail::index_of(lab, chamber);
  if (first.empty()) first = chamber + ".0";
  if (second.empty()) second = chamber + ".1";
  const std::string consumed[] = {chamber};
  const std::string produced[] = {first, second};
  detail::check_new_names(lab, consumed, produced);

  const Chamber& src = lab.chambers[idx];
  Chamber upper{first, fraction * src.volume, {}};
  Chamber lower{second, (1.0 - fraction) * src.volume, {}};
  for (const auto& c : src.contents) {
    upper.contents.push_back({c.state, c.moles * fraction});
    lower.contents.push_back({c.state, c.moles * (1.0 - fraction)});
  }
  LabState next = lab;
  next.chambers[idx] = std::move(upper);
  next.chambers.insert(next.chambers.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                       std::move(lower));
  return {std::move(next),
          make_event(EventKind::partition, 0.0,
                     "partition " + chamber + " at " + detail::fmt(fraction) + " -> " + first +
                         " " + second)};
}

/// Removes the wall between two chambers. No heat is booked for the removal.
inline Transition join(const LabState& lab, const std::string& a, const std::string& b,
                       std::string into = {}) {
  detail::validate_lab(lab);
  if (a == b) throw NameError("cannot join chamber '" + a + "' with itself");
  const std::size_t ia = detail::index_of(lab, a);
  const std::size_t ib = detail::index_of(lab, b);
  if (into.empty()) into = a;
  const std::string consumed[] = {a, b};
  const std::string produced[] = {into};
  detail::check_new_names(lab, consumed, produced);

  const Chamber& ca = lab.chambers[ia];
  const Chamber& cb = lab.chambers[ib];
  std::vector<GasComponent> merged = ca.contents;
  merged.insert(merged.end(), cb.contents.begin(), cb.contents.end());
  LabState next = lab;
  next.chambers[ia] = Chamber{into, ca.volume + cb.volume, merge_components(std::move(merged))};
  next.chambers.erase(next.chambers.begin() + static_cast<std::ptrdiff_t>(ib));
  return {std::move(next), make_event(EventKind::join, 0.0, "join " + a + " " + b + " -> " + into)};
}

}  // namespace qtherm
