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

#include <exception>
#include <map>
#include <optional>
#include <string>
#include <typeinfo>
#include <utility>
#include <variant>
#include <vector>

#include "qtherm/audit.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/linalg.hpp"
#include "qtherm/observers.hpp"
#include "qtherm/protocol.hpp"
#include "qtherm/quantum.hpp"
#include "qtherm/thermo.hpp"

namespace qtherm::protocol {

/// A runtime failure inside step `step()` (1-based). The original library
/// exception is kept in cause().
class StepError : public Error {
 public:
  StepError(int step, SourcePos pos, const std::string& message, std::exception_ptr cause)
      : Error("step " + std::to_string(step) + " (line " + std::to_string(pos.line) +
              "): " + message),
        step_(step),
        pos_(pos),
        cause_(std::move(cause)) {}

  int step() const { return step_; }
  SourcePos position() const { return pos_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  int step_;
  SourcePos pos_;
  std::exception_ptr cause_;
};

class AssertClosedError : public Error {
 public:
  AssertClosedError(int step, std::string observer, std::string checkpoint, std::string chamber)
      : Error("step " + std::to_string(step) + ": assert-closed failed: observer '" + observer +
              "' distinguishes chamber '" + chamber + "' from checkpoint '" + checkpoint + "'"),
        step_(step),
        observer_(std::move(observer)),
        checkpoint_(std::move(checkpoint)),
        chamber_(std::move(chamber)) {}

  int step() const { return step_; }
  const std::string& observer() const { return observer_; }
  const std::string& checkpoint() const { return checkpoint_; }
  /// Differing chamber, or a note that the chamber sets differ.
  const std::string& chamber() const { return chamber_; }

 private:
  int step_;
  std::string observer_;
  std::string checkpoint_;
  std::string chamber_;
};

struct RunResult {
  LabState lab;
  Ledger ledger;
  std::vector<Verdict> verdicts;
  /// Declared observers in declaration order.
  std::vector<Observer> observers;
};

namespace detail {

class Interpreter {
 public:
  explicit Interpreter(double tol) : tol_(tol) {}

  RunResult run(const ProtocolAst& ast) {
    for (const auto& d : ast.declarations) std::visit(*this, d);
    for (const auto& [chamber, parts, moles] : fills_) {
      auto& c = find_chamber(chamber);
      std::vector<GasComponent> comps;
      for (const auto& [gas, w] : parts) comps.push_back({gases_.at(gas), w * moles});
      c.contents = merge_components(std::move(comps));
    }
    for (const auto& s : ast.steps) {
      ++step_;
      pos_ = position_of(s);
      try {
        std::visit(*this, s);
      } catch (const AssertClosedError&) {
        throw;
      } catch (const Error& e) {
        throw StepError(step_, pos_, e.what(), std::current_exception());
      }
    }
    RunResult out{std::move(lab_), std::move(ledger_), std::move(verdicts_), {}};
    for (const auto& name : observer_order_) out.observers.push_back(observers_.at(name));
    return out;
  }

  // Declarations.
  void operator()(const SpaceDecl& d) { lab_.lab_dim = static_cast<std::size_t>(d.dim); }
  void operator()(const TempDecl& d) { lab_.temperature = d.value; }
  void operator()(const KetDecl& d) { kets_.emplace(d.name, Ket(d.amplitudes)); }
  void operator()(const GasFromKet& d) {
    gases_.emplace(d.name, StatisticalMatrix::pure(kets_.at(d.ket), d.name));
  }
  void operator()(const GasMatrix& d) {
    std::vector<Complex> flat;
    for (const auto& r : d.rows) flat.insert(flat.end(), r.begin(), r.end());
    gases_.emplace(d.name, StatisticalMatrix(ComplexMatrix(d.rows.size(), flat), d.name));
  }
  void operator()(const ObserverDecl& d) {
    std::vector<TableRow> table;
    for (const auto& [lab, obs] : d.table) table.push_back({kets_.at(lab), kets_.at(obs)});
    observers_.emplace(d.name,
                       build_observer(d.name, std::move(table), static_cast<std::size_t>(d.dim)));
    observer_order_.push_back(d.name);
  }
  void operator()(const ChamberDecl& d) { lab_.chambers.push_back({d.name, d.volume, {}}); }
  void operator()(const FillDecl& d) { fills_.push_back({d.chamber, d.parts, d.moles}); }

  // Steps.
  void operator()(const MixStep& s) {
    record(mix(lab_, s.a, s.b, povm(s.povm), s.into));
  }

  void operator()(const SeparateStep& s) {
    if (s.povm) {
      record(separate(lab_, s.chamber, povm(*s.povm), {s.first, s.second}));
      return;
    }
    const Chamber& c = lab_.chamber(s.chamber);
    if (c.contents.empty()) throw EmptyChamberError("chamber '" + s.chamber + "' is empty");
    const auto contents = canonical_contents(c);
    const Povm p = optimal_separation_povm(contents);
    const StatisticalMatrix lambda(aggregate(contents).hermitian_part());
    // Nonzero outcomes take the given names in order.
    std::vector<std::string> names;
    std::size_t used = 0;
    const std::string given[] = {s.first, s.second};
    const auto outcomes = measure(p, lambda);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i].probability < kNegligibleFraction) {
        names.push_back(s.chamber + "#" + std::to_string(i));
        continue;
      }
      if (used == 2) {
        throw NameError("eigenbasis separation of '" + s.chamber + "' has more than two outcomes");
      }
      names.push_back(given[used++]);
    }
    record(separate(lab_, s.chamber, p, std::move(names)));
  }

  void operator()(const RotateStep& s) {
    std::vector<std::pair<Ket, Ket>> mapping;
    for (const auto& [from, to] : s.mapping) mapping.emplace_back(kets_.at(from), kets_.at(to));
    record(rotate(lab_, s.chamber, mapping));
  }

  void operator()(const PartitionStep& s) {
    record(partition(lab_, s.chamber, s.fraction, s.first, s.second));
  }

  void operator()(const JoinStep& s) { record(join(lab_, s.a, s.b, s.into)); }

  void operator()(const CheckpointStep& s) { ledger_.checkpoint(s.label, lab_, step_); }

  void operator()(const AssertClosedStep& s) {
    const Observer& obs = observers_.at(s.observer);
    const LabState& snap = ledger_.checkpoint_at(s.checkpoint).snapshot;
    std::optional<std::string> diff;
    try {
      diff = first_difference(obs, snap, lab_, tol_);
    } catch (const ShapeError&) {
      // Name a chamber present on only one side.
      for (const auto& c : lab_.chambers)
        if (!snap.has(c.name)) diff = diff.value_or(c.name);
      for (const auto& c : snap.chambers)
        if (!lab_.has(c.name)) diff = diff.value_or(c.name);
    }
    if (diff) throw AssertClosedError(step_, s.observer, s.checkpoint, *diff);
  }

  void operator()(const AuditStep& s) {
    Verdict v = audit(ledger_, observers_.at(s.observer), s.checkpoint, lab_, tol_);
    v.step_index = step_;
    verdicts_.push_back(std::move(v));
  }

 private:
  struct Fill {
    std::string chamber;
    std::vector<std::pair<std::string, double>> parts;
    double moles;
  };

  Chamber& find_chamber(const std::string& name) {
    for (auto& c : lab_.chambers)
      if (c.name == name) return c;
    throw NameError("unknown chamber '" + name + "'");
  }

  Povm povm(const PovmRef& ref) const {
    std::vector<std::vector<Ket>> groups;
    std::vector<std::string> labels;
    for (const auto& g : ref.effects) {
      std::vector<Ket> kets;
      std::string label;
      for (const auto& k : g) {
        kets.push_back(kets_.at(k));
        label += (label.empty() ? "" : "+") + k;
      }
      groups.push_back(std::move(kets));
      labels.push_back(std::move(label));
    }
    Povm p = Povm::from_projector_groups(groups, std::move(labels));
    if (ref.lift) return lift_povm(p, observers_.at(*ref.lift).embedding());
    return p;
  }

  void record(Transition t) {
    t.event.step_index = step_;
    ledger_.append(std::move(t.event));
    lab_ = std::move(t.lab);
  }

  double tol_;
  int step_ = 0;
  SourcePos pos_;
  LabState lab_;
  Ledger ledger_;
  std::vector<Verdict> verdicts_;
  std::map<std::string, Ket> kets_;
  std::map<std::string, StatisticalMatrix> gases_;
  std::map<std::string, Observer> observers_;
  std::vector<std::string> observer_order_;
  std::vector<Fill> fills_;
};

}  // namespace detail

/// Runs a parsed protocol from its declared initial lab.
inline RunResult execute(const ProtocolAst& ast, double tol = kDefaultTol) {
  return detail::Interpreter(tol).run(ast);
}

}  // namespace qtherm::protocol
