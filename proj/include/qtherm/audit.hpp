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

#pragma once

#include <optional>
#include <string>

#include "qtherm/errors.hpp"
#include "qtherm/observers.hpp"
#include "qtherm/thermo.hpp"

namespace qtherm {

inline constexpr double kDefaultTol = 1e-9;

enum class Classification { consistent, apparent_violation, open_cycle };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::consistent: return "consistent";
    case Classification::apparent_violation: return "apparent_violation";
    case Classification::open_cycle: return "open_cycle";
  }
  return "?";
}

inline std::optional<Classification> parse_classification(const std::string& s) {
  for (auto c : {Classification::consistent, Classification::apparent_violation,
                 Classification::open_cycle})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

struct Verdict {
  std::string observer;
  std::string from_checkpoint;
  double q_total = 0.0;
  double q_over_t = 0.0;
  bool cycle_closed = false;
  Classification classification = Classification::open_cycle;
  /// Protocol step that requested the audit (0 when called directly).
  int step_index = 0;
};

/// Isothermal Clausius test. Only a closed cycle (as the observer sees it)
/// carries the claim Delta S = 0, so only then is Q/T <= 0 required.
inline Classification classify(bool cycle_closed, double q_over_t, double tol) {
  if (!cycle_closed) return Classification::open_cycle;
  return q_over_t > tol ? Classification::apparent_violation : Classification::consistent;
}

inline Verdict audit(const Ledger& ledger, const Observer& obs, const std::string& from_label,
                     const LabState& current, double tol = kDefaultTol) {
  const Checkpoint& cp = ledger.checkpoint_at(from_label);
  Verdict v;
  v.observer = obs.name();
  v.from_checkpoint = from_label;
  v.q_total = ledger.heat_since(from_label) + 0.0;
  v.q_over_t = v.q_total / current.temperature + 0.0;
  try {
    v.cycle_closed = states_equivalent(obs, cp.snapshot, current, tol);
  } catch (const ShapeError&) {
    // A different set of compartments is not the starting configuration.
    v.cycle_closed = false;
  }
  v.classification = classify(v.cycle_closed, v.q_over_t, tol);
  return v;
}

}  // namespace qtherm
