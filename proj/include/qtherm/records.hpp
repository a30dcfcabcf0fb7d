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

// Line-delimited run records and the human-readable report.
//
//   event step=3 kind=mix Q=0.693147180559945 W=0.693147180559945 desc="mix A B -> C"
//   view observer=tatiana chamber=A volume=0.5 moles=0.5 weights=1
//   verdict step=12 observer=tatiana from=a qTotal=0.27 qOverT=0.27 closed=true classification=apparent_violation
//
// A run prints all events, then the final view of every observer, then the
// verdicts in protocol order.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qtherm/audit.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/interpreter.hpp"
#include "qtherm/observers.hpp"
#include "qtherm/thermo.hpp"

namespace qtherm::records {

class RecordError : public Error {
 public:
  using Error::Error;
};

struct ViewRecord {
  std::string observer;
  std::string chamber;
  double volume = 0.0;
  double moles = 0.0;
  /// Eigenvalues of the coarse-grained chamber state, descending.
  std::vector<double> weights;
};

using Record = std::variant<LedgerEvent, ViewRecord, Verdict>;

inline std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x + 0.0);
  return buf;
}

namespace detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::map<std::string, std::string> fields(std::string_view line, std::string& head) {
  std::size_t i = line.find(' ');
  head = std::string(line.substr(0, i));
  std::map<std::string, std::string> out;
  while (i != std::string_view::npos && i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    const std::size_t eq = line.find('=', i);
    if (eq == std::string_view::npos) throw RecordError("field without '=' in record");
    std::string key(line.substr(i, eq - i));
    std::string value;
    i = eq + 1;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char c = line[i++];
        if (c == '\\' && i < line.size()) {
          value += line[i++];
        } else if (c == '"') {
          closed = true;
          break;
        } else {
          value += c;
        }
      }
      if (!closed) throw RecordError("unterminated quoted field '" + key + "'");
    } else {
      const std::size_t sp = line.find(' ', i);
      value = std::string(line.substr(i, sp == std::string_view::npos ? sp : sp - i));
      i = sp;
    }
    if (!out.emplace(key, value).second) throw RecordError("duplicate field '" + key + "'");
  }
  return out;
}

inline const std::string& need(const std::map<std::string, std::string>& f, const char* key) {
  auto it = f.find(key);
  if (it == f.end()) throw RecordError(std::string("missing field '") + key + "'");
  return it->second;
}

inline double real(const std::map<std::string, std::string>& f, const char* key) {
  const std::string& s = need(f, key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw RecordError(std::string("bad number in '") + key + "'");
  return v;
}

inline int integer(const std::map<std::string, std::string>& f, const char* key) {
  const std::string& s = need(f, key);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw RecordError(std::string("bad integer in '") + key + "'");
  return static_cast<int>(v);
}

}  // namespace detail

inline std::string format_record(const LedgerEvent& e) {
  return "event step=" + std::to_string(e.step_index) + " kind=" + to_string(e.kind) +
         " Q=" + number(e.heat_absorbed_by_gas) + " W=" + number(e.work_done_by_gas) +
         " desc=" + detail::quote(e.description);
}

inline std::string format_record(const ViewRecord& v) {
  std::string w;
  for (std::size_t i = 0; i < v.weights.size(); ++i) w += (i ? "," : "") + number(v.weights[i]);
  if (w.empty()) w = "-";
  return "view observer=" + v.observer + " chamber=" + v.chamber + " volume=" + number(v.volume) +
         " moles=" + number(v.moles) + " weights=" + w;
}

inline std::string format_record(const Verdict& v) {
  return "verdict step=" + std::to_string(v.step_index) + " observer=" + v.observer +
         " from=" + v.from_checkpoint + " qTotal=" + number(v.q_total) +
         " qOverT=" + number(v.q_over_t) + " closed=" + (v.cycle_closed ? "true" : "false") +
         " classification=" + to_string(v.classification);
}

inline std::string format_record(const Record& r) {
  return std::visit([](const auto& x) { return format_record(x); }, r);
}

inline Record parse_record(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::string head;
  const auto f = detail::fields(line, head);
  if (head == "event") {
    LedgerEvent e;
    e.step_index = detail::integer(f, "step");
    const auto kind = parse_event_kind(detail::need(f, "kind"));
    if (!kind) throw RecordError("unknown event kind '" + detail::need(f, "kind") + "'");
    e.kind = *kind;
    e.heat_absorbed_by_gas = detail::real(f, "Q");
    e.work_done_by_gas = detail::real(f, "W");
    e.description = detail::need(f, "desc");
    return e;
  }
  if (head == "view") {
    ViewRecord v;
    v.observer = detail::need(f, "observer");
    v.chamber = detail::need(f, "chamber");
    v.volume = detail::real(f, "volume");
    v.moles = detail::real(f, "moles");
    const std::string& w = detail::need(f, "weights");
    if (w != "-") {
      std::stringstream ss(w);
      std::string item;
      while (std::getline(ss, item, ',')) {
        std::map<std::string, std::string> one{{"w", item}};
        v.weights.push_back(detail::real(one, "w"));
      }
    }
    return v;
  }
  if (head == "verdict") {
    Verdict v;
    v.step_index = detail::integer(f, "step");
    v.observer = detail::need(f, "observer");
    v.from_checkpoint = detail::need(f, "from");
    v.q_total = detail::real(f, "qTotal");
    v.q_over_t = detail::real(f, "qOverT");
    const std::string& closed = detail::need(f, "closed");
    if (closed != "true" && closed != "false") throw RecordError("bad boolean in 'closed'");
    v.cycle_closed = closed == "true";
    const auto c = parse_classification(detail::need(f, "classification"));
    if (!c) throw RecordError("unknown classification");
    v.classification = *c;
    return v;
  }
  throw RecordError("unknown record type '" + head + "'");
}

inline std::vector<ViewRecord> view_records(const Observer& obs, const LabState& lab) {
  std::vector<ViewRecord> out;
  for (const auto& c : view(obs, lab).chambers) {
    ViewRecord r{obs.name(), c.name, c.volume, c.moles, {}};
    for (const auto& w : c.mixture) r.weights.push_back(w.weight);
    out.push_back(std::move(r));
  }
  return out;
}

/// Everything a run reports, in output order. An observer filter keeps only
/// that observer's views and verdicts.
inline std::vector<Record> collect(const protocol::RunResult& run,
                                   const std::optional<std::string>& observer = std::nullopt) {
  std::vector<Record> out;
  for (const auto& e : run.ledger.events()) out.emplace_back(e);
  for (const auto& obs : run.observers) {
    if (observer && obs.name() != *observer) continue;
    for (auto& v : view_records(obs, run.lab)) out.emplace_back(std::move(v));
  }
  for (const auto& v : run.verdicts) {
    if (observer && v.observer != *observer) continue;
    out.emplace_back(v);
  }
  return out;
}

inline std::string render_records(const protocol::RunResult& run,
                                  const std::optional<std::string>& observer = std::nullopt) {
  std::string out;
  for (const auto& r : collect(run, observer)) out += format_record(r) + "\n";
  return out;
}

inline std::string render_table(const protocol::RunResult& run,
                                const std::optional<std::string>& observer = std::nullopt) {
  std::string out;
  char buf[256];
  out += "Ledger (T = " + number(run.lab.temperature) + ")\n";
  std::snprintf(buf, sizeof buf, "  %4s  %-10s  %14s  %14s  %s\n", "step", "kind", "Q", "W",
                "description");
  out += buf;
  for (const auto& e : run.ledger.events()) {
    std::snprintf(buf, sizeof buf, "  %4d  %-10s  %14.9f  %14.9f  ", e.step_index,
                  to_string(e.kind), e.heat_absorbed_by_gas + 0.0, e.work_done_by_gas + 0.0);
    out += buf + e.description + "\n";
  }

  out += "\nFinal views\n";
  for (const auto& obs : run.observers) {
    if (observer && obs.name() != *observer) continue;
    out += "  " + obs.name() + "\n";
    for (const auto& v : view_records(obs, run.lab)) {
      std::snprintf(buf, sizeof buf, "    %-10s  V=%-10.6g  n=%-10.6g  spectrum=", v.chamber.c_str(),
                    v.volume, v.moles);
      out += buf;
      for (std::size_t i = 0; i < v.weights.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", v.weights[i]);
        out += buf;
      }
      out += "\n";
    }
  }

  out += "\nVerdicts\n";
  bool any = false;
  for (const auto& v : run.verdicts) {
    if (observer && v.observer != *observer) continue;
    any = true;
    std::snprintf(buf, sizeof buf, "  step %-3d %-10s from %-6s Q=%-12.9f Q/T=%-12.9f %-6s %s\n",
                  v.step_index, v.observer.c_str(), v.from_checkpoint.c_str(), v.q_total,
                  v.q_over_t, v.cycle_closed ? "closed" : "open", to_string(v.classification));
    out += buf;
  }
  if (!any) out += "  (none)\n";
  return out;
}

}  // namespace qtherm::records
