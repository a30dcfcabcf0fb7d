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

// Line-oriented protocol language.
//
//   program     := line*
//   line        := decl | step | comment | blank          ('#' starts a comment)
//   decl        := "space" ID "dim" INT | "temp" REAL
//                | "ket" ID "=" "[" complex ("," complex)* "]"
//                | "gas" ID "from" "ket" ID
//                | "gas" ID "matrix" "[" row ("," row)* "]"   row := "[" complex ("," complex)* "]"
//                | "observer" ID "table" "{" ID "->" ID ("," ID "->" ID)* "}" "dim" INT
//                | "chamber" ID "volume" REAL
//                | "fill" ID "{" ID ":" REAL ("," ID ":" REAL)* "}" "moles" REAL
//   step        := "mix" ID ID "into" ID "by" povm-ref
//                | "separate" ID "by" ("eigenbasis" | povm-ref) "into" ID ID
//                | "rotate" ID "map" "{" ID "->" ID ("," ID "->" ID)* "}"
//                | "partition" ID "at" REAL "into" ID ID
//                | "join" ID ID "into" ID
//                | "checkpoint" ID
//                | "assert-closed" ID "from" ID
//                | "audit" ID "from" ID
//   povm-ref    := "povm" "{" effect ("," effect)* "}" ["lift" ID]
//   effect      := ID ("+" ID)*         projector onto the span of the listed kets
//   complex     := REAL | REAL ("+"|"-") REAL "i"
//
// All declarations precede the first step. Names are checked as they are
// used: kets, gases, observers, chambers and checkpoints must be declared
// first, and chambers consumed by a step cannot be referenced again until a
// later step produces a chamber with that name.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qtherm/errors.hpp"
#include "qtherm/linalg.hpp"
#include "qtherm/observers.hpp"
#include "qtherm/quantum.hpp"

namespace qtherm::protocol {

struct SourcePos {
  int line = 0;
  int column = 0;
};

class ParseError : public Error {
 public:
  ParseError(SourcePos pos, std::string message, std::string token)
      : Error("line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) +
              ": " + message + (token.empty() ? "" : " (at '" + token + "')")),
        pos_(pos),
        message_(std::move(message)),
        token_(std::move(token)) {}

  int line() const { return pos_.line; }
  int column() const { return pos_.column; }
  const std::string& message() const { return message_; }
  const std::string& token() const { return token_; }

 private:
  SourcePos pos_;
  std::string message_;
  std::string token_;
};

// ---------------------------------------------------------------------------
// AST

struct SpaceDecl {
  SourcePos pos;
  std::string name;
  int dim = 0;
};
struct TempDecl {
  SourcePos pos;
  double value = 1.0;
};
struct KetDecl {
  SourcePos pos;
  std::string name;
  std::vector<Complex> amplitudes;
};
struct GasFromKet {
  SourcePos pos;
  std::string name;
  std::string ket;
};
struct GasMatrix {
  SourcePos pos;
  std::string name;
  std::vector<std::vector<Complex>> rows;
};
struct ObserverDecl {
  SourcePos pos;
  std::string name;
  std::vector<std::pair<std::string, std::string>> table;
  int dim = 0;
};
struct ChamberDecl {
  SourcePos pos;
  std::string name;
  double volume = 0.0;
};
struct FillDecl {
  SourcePos pos;
  std::string chamber;
  std::vector<std::pair<std::string, double>> parts;
  double moles = 0.0;
};

using Declaration = std::variant<SpaceDecl, TempDecl, KetDecl, GasFromKet, GasMatrix,
                                 ObserverDecl, ChamberDecl, FillDecl>;

struct PovmRef {
  SourcePos pos;
  /// Each effect projects onto the span of its kets.
  std::vector<std::vector<std::string>> effects;
  std::optional<std::string> lift;
};

struct MixStep {
  SourcePos pos;
  std::string a, b, into;
  PovmRef povm;
};
struct SeparateStep {
  SourcePos pos;
  std::string chamber;
  /// nullopt selects the eigenbasis of the chamber's aggregate state.
  std::optional<PovmRef> povm;
  std::string first, second;
};
struct RotateStep {
  SourcePos pos;
  std::string chamber;
  std::vector<std::pair<std::string, std::string>> mapping;
};
struct PartitionStep {
  SourcePos pos;
  std::string chamber;
  double fraction = 0.5;
  std::string first, second;
};
struct JoinStep {
  SourcePos pos;
  std::string a, b, into;
};
struct CheckpointStep {
  SourcePos pos;
  std::string label;
};
struct AssertClosedStep {
  SourcePos pos;
  std::string observer, checkpoint;
};
struct AuditStep {
  SourcePos pos;
  std::string observer, checkpoint;
};

using Step = std::variant<MixStep, SeparateStep, RotateStep, PartitionStep, JoinStep,
                          CheckpointStep, AssertClosedStep, AuditStep>;

struct ProtocolAst {
  std::vector<Declaration> declarations;
  std::vector<Step> steps;
};

inline SourcePos position_of(const Step& s) {
  return std::visit([](const auto& n) { return n.pos; }, s);
}

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class TokKind { ident, number, symbol, arrow };

struct Token {
  TokKind kind;
  std::string text;
  SourcePos pos;
  double value = 0.0;
  bool imaginary = false;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> lex_line(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto at = [&](std::size_t k) { return SourcePos{line_no, static_cast<int>(k) + 1}; };
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (line.substr(i, 13) == "assert-closed" &&
        (i + 13 == line.size() || !ident_char(line[i + 13]))) {
      out.push_back({TokKind::ident, "assert-closed", at(i)});
      i += 13;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      out.push_back({TokKind::ident, std::string(line.substr(i, j - i)), at(i)});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
      std::size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      if (j < line.size() && line[j] == '.') {
        ++j;
        while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      }
      if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
        if (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) {
          while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
          j = k;
        }
      }
      Token t{TokKind::number, std::string(line.substr(i, j - i)), at(i)};
      t.value = std::strtod(t.text.c_str(), nullptr);
      if (j < line.size() && line[j] == 'i' && (j + 1 == line.size() || !ident_char(line[j + 1]))) {
        t.imaginary = true;
        t.text += 'i';
        ++j;
      } else if (j < line.size() && ident_char(line[j])) {
        std::size_t k = j;
        while (k < line.size() && ident_char(line[k])) ++k;
        throw ParseError(at(i), "malformed number", std::string(line.substr(i, k - i)));
      }
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({TokKind::arrow, "->", at(i)});
      i += 2;
      continue;
    }
    if (std::string_view("=[]{},:+-").find(c) != std::string_view::npos) {
      out.push_back({TokKind::symbol, std::string(1, c), at(i)});
      ++i;
      continue;
    }
    throw ParseError(at(i), "unexpected character", std::string(1, c));
  }
  return out;
}

inline const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "space", "dim",   "temp",     "ket",        "gas",    "from",          "matrix",
      "observer", "table", "chamber", "volume",   "fill",   "moles",         "mix",
      "into",  "by",    "separate", "eigenbasis", "povm",   "lift",          "rotate",
      "map",   "partition", "at",   "join",       "checkpoint", "assert-closed", "audit"};
  return words;
}

// Cursor over one line's tokens.
class LineCursor {
 public:
  LineCursor(std::vector<Token> tokens, int line_no, int line_len)
      : toks_(std::move(tokens)), line_no_(line_no), line_len_(line_len) {}

  bool done() const { return i_ >= toks_.size(); }

  const Token* peek() const { return done() ? nullptr : &toks_[i_]; }

  SourcePos here() const {
    if (!done()) return toks_[i_].pos;
    return SourcePos{line_no_, std::max(1, line_len_)};
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(here(), msg, done() ? "<end of line>" : toks_[i_].text);
  }

  const Token& next(const std::string& expectation) {
    if (done()) fail("expected " + expectation);
    return toks_[i_++];
  }

  std::pair<std::string, SourcePos> ident(const std::string& what) {
    if (done() || toks_[i_].kind != TokKind::ident) fail("expected " + what);
    const Token& t = toks_[i_++];
    if (reserved_words().count(t.text)) {
      throw ParseError(t.pos, "reserved word cannot be used as " + what, t.text);
    }
    return {t.text, t.pos};
  }

  bool is_keyword(const char* kw) const {
    return !done() && toks_[i_].kind == TokKind::ident && toks_[i_].text == kw;
  }

  void keyword(const char* kw) {
    if (!is_keyword(kw)) fail(std::string("expected '") + kw + "'");
    ++i_;
  }

  bool is_symbol(char c) const {
    return !done() && toks_[i_].kind == TokKind::symbol && toks_[i_].text[0] == c;
  }

  void symbol(char c) {
    if (!is_symbol(c)) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  void arrow() {
    if (done() || toks_[i_].kind != TokKind::arrow) fail("expected '->'");
    ++i_;
  }

  double real() {
    double sign = 1.0;
    if (is_symbol('-') || is_symbol('+')) {
      sign = toks_[i_].text[0] == '-' ? -1.0 : 1.0;
      ++i_;
    }
    if (done() || toks_[i_].kind != TokKind::number || toks_[i_].imaginary) fail("expected a number");
    return sign * toks_[i_++].value;
  }

  int integer(const std::string& what) {
    if (done() || toks_[i_].kind != TokKind::number || toks_[i_].imaginary ||
        toks_[i_].text.find_first_of(".eE") != std::string::npos) {
      fail("expected an integer " + what);
    }
    return static_cast<int>(toks_[i_++].value);
  }

  Complex complex() {
    double sign = 1.0;
    if (is_symbol('-') || is_symbol('+')) {
      sign = toks_[i_].text[0] == '-' ? -1.0 : 1.0;
      ++i_;
    }
    if (done() || toks_[i_].kind != TokKind::number) fail("expected a number");
    const Token& first = toks_[i_++];
    if (first.imaginary) return Complex(0.0, sign * first.value);
    const double re = sign * first.value;
    if ((is_symbol('+') || is_symbol('-')) && i_ + 1 < toks_.size() &&
        toks_[i_ + 1].kind == TokKind::number && toks_[i_ + 1].imaginary) {
      const double s = toks_[i_].text[0] == '-' ? -1.0 : 1.0;
      i_ += 1;
      return Complex(re, s * toks_[i_++].value);
    }
    return Complex(re, 0.0);
  }

  void end() {
    if (!done()) fail("unexpected extra input");
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int line_no_;
  int line_len_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class Parser {
 public:
  ProtocolAst run(std::string_view source) {
    if (source.substr(0, 3) == "\xEF\xBB\xBF") source.remove_prefix(3);
    int line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
      std::size_t nl = source.find('\n', start);
      if (nl == std::string_view::npos) nl = source.size();
      std::string_view line = source.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      last_line_ = line_no;
      auto toks = lex_line(line, line_no);
      if (!toks.empty()) {
        LineCursor cur(std::move(toks), line_no, static_cast<int>(line.size()));
        statement(cur);
      }
      if (nl == source.size()) break;
      start = nl + 1;
    }
    if (!space_) throw ParseError({1, 1}, "missing 'space' declaration", "");
    return std::move(ast_);
  }

 private:
  struct KetInfo {
    std::size_t dim;
    Ket ket;
  };

  void statement(LineCursor& cur) {
    const Token* head = cur.peek();
    if (head->kind != TokKind::ident) cur.fail("expected a declaration or step");
    const std::string kw = head->text;
    const SourcePos pos = head->pos;
    static const std::set<std::string> decls = {"space", "temp",    "ket", "gas",
                                                "observer", "chamber", "fill"};
    static const std::set<std::string> steps = {"mix",  "separate",   "rotate",        "partition",
                                                "join", "checkpoint", "assert-closed", "audit"};
    if (decls.count(kw)) {
      if (!ast_.steps.empty()) {
        throw ParseError(pos, "declarations must precede the first step", kw);
      }
      declaration(cur, kw, pos);
    } else if (steps.count(kw)) {
      require_space(pos, kw);
      step(cur, kw, pos);
    } else {
      cur.fail("unknown statement");
    }
    cur.end();
  }

  void require_space(SourcePos pos, const std::string& kw) {
    if (!space_) throw ParseError(pos, "'space' must be declared before '" + kw + "'", kw);
  }

  std::size_t lab_dim() const { return static_cast<std::size_t>(space_->dim); }

  const KetInfo& ket_ref(const std::pair<std::string, SourcePos>& id,
                         std::optional<std::size_t> dim, const std::string& role) {
    auto it = kets_.find(id.first);
    if (it == kets_.end()) throw ParseError(id.second, "undeclared ket", id.first);
    if (dim && it->second.dim != *dim) {
      throw ParseError(id.second,
                       role + " ket must have dimension " + std::to_string(*dim) + ", has " +
                           std::to_string(it->second.dim),
                       id.first);
    }
    return it->second;
  }

  void declaration(LineCursor& cur, const std::string& kw, SourcePos pos) {
    cur.next(kw);
    if (kw == "space") {
      if (space_) throw ParseError(pos, "duplicate 'space' declaration", kw);
      auto name = cur.ident("space name");
      cur.keyword("dim");
      const SourcePos dpos = cur.here();
      const int dim = cur.integer("dimension");
      if (dim < 1 || dim > static_cast<int>(kMaxDim)) {
        throw ParseError(dpos, "space dimension must be between 1 and 8", std::to_string(dim));
      }
      space_ = SpaceDecl{pos, name.first, dim};
      ast_.declarations.push_back(*space_);
    } else if (kw == "temp") {
      if (have_temp_) throw ParseError(pos, "duplicate 'temp' declaration", kw);
      const SourcePos vpos = cur.here();
      const double t = cur.real();
      if (!(t > 0.0)) throw ParseError(vpos, "temperature must be positive", std::to_string(t));
      have_temp_ = true;
      ast_.declarations.push_back(TempDecl{pos, t});
    } else if (kw == "ket") {
      auto name = cur.ident("ket name");
      if (kets_.count(name.first)) throw ParseError(name.second, "duplicate ket", name.first);
      cur.symbol('=');
      cur.symbol('[');
      const SourcePos vpos = cur.here();
      std::vector<Complex> amps{cur.complex()};
      while (cur.is_symbol(',')) {
        cur.symbol(',');
        amps.push_back(cur.complex());
      }
      cur.symbol(']');
      try {
        Ket k(amps);
        kets_.emplace(name.first, KetInfo{amps.size(), std::move(k)});
      } catch (const Error& e) {
        throw ParseError(vpos, e.what(), name.first);
      }
      ast_.declarations.push_back(KetDecl{pos, name.first, std::move(amps)});
    } else if (kw == "gas") {
      require_space(pos, kw);
      auto name = cur.ident("gas name");
      if (gases_.count(name.first)) throw ParseError(name.second, "duplicate gas", name.first);
      if (cur.is_keyword("from")) {
        cur.keyword("from");
        cur.keyword("ket");
        auto ket = cur.ident("ket name");
        ket_ref(ket, lab_dim(), "gas");
        gases_.insert(name.first);
        ast_.declarations.push_back(GasFromKet{pos, name.first, ket.first});
      } else if (cur.is_keyword("matrix")) {
        cur.keyword("matrix");
        const SourcePos mpos = cur.here();
        std::vector<std::vector<Complex>> rows;
        cur.symbol('[');
        do {
          if (!rows.empty()) cur.symbol(',');
          cur.symbol('[');
          std::vector<Complex> row{cur.complex()};
          while (cur.is_symbol(',')) {
            cur.symbol(',');
            row.push_back(cur.complex());
          }
          cur.symbol(']');
          rows.push_back(std::move(row));
        } while (cur.is_symbol(','));
        cur.symbol(']');
        std::vector<Complex> flat;
        for (const auto& r : rows) {
          if (r.size() != rows.size()) throw ParseError(mpos, "gas matrix is not square", name.first);
          flat.insert(flat.end(), r.begin(), r.end());
        }
        if (rows.size() != lab_dim()) {
          throw ParseError(mpos, "gas matrix must have the space dimension " +
                                     std::to_string(lab_dim()),
                           name.first);
        }
        try {
          StatisticalMatrix check(ComplexMatrix(rows.size(), flat));
        } catch (const Error& e) {
          throw ParseError(mpos, e.what(), name.first);
        }
        gases_.insert(name.first);
        ast_.declarations.push_back(GasMatrix{pos, name.first, std::move(rows)});
      } else {
        cur.fail("expected 'from' or 'matrix'");
      }
    } else if (kw == "observer") {
      require_space(pos, kw);
      auto name = cur.ident("observer name");
      if (observers_.count(name.first)) {
        throw ParseError(name.second, "duplicate observer", name.first);
      }
      cur.keyword("table");
      std::vector<std::pair<std::pair<std::string, SourcePos>, std::pair<std::string, SourcePos>>>
          rows;
      cur.symbol('{');
      do {
        if (!rows.empty()) cur.symbol(',');
        auto lab = cur.ident("lab ket");
        cur.arrow();
        auto obs = cur.ident("observer ket");
        rows.push_back({lab, obs});
      } while (cur.is_symbol(','));
      cur.symbol('}');
      cur.keyword("dim");
      const SourcePos dpos = cur.here();
      const int dim = cur.integer("dimension");
      if (dim < 1 || dim > static_cast<int>(kMaxDim)) {
        throw ParseError(dpos, "observer dimension must be between 1 and 8", std::to_string(dim));
      }
      std::vector<TableRow> table;
      ObserverDecl decl{pos, name.first, {}, dim};
      for (const auto& [lab, obs] : rows) {
        const auto& lk = ket_ref(lab, lab_dim(), "observer table lab");
        const auto& ok = ket_ref(obs, static_cast<std::size_t>(dim), "observer table image");
        table.push_back({lk.ket, ok.ket});
        decl.table.emplace_back(lab.first, obs.first);
      }
      try {
        build_observer(name.first, std::move(table), static_cast<std::size_t>(dim));
      } catch (const Error& e) {
        throw ParseError(name.second, e.what(), name.first);
      }
      observers_.emplace(name.first, static_cast<std::size_t>(dim));
      ast_.declarations.push_back(std::move(decl));
    } else if (kw == "chamber") {
      require_space(pos, kw);
      auto name = cur.ident("chamber name");
      if (live_.count(name.first)) throw ParseError(name.second, "duplicate chamber", name.first);
      cur.keyword("volume");
      const SourcePos vpos = cur.here();
      const double v = cur.real();
      if (!(v > 0.0)) throw ParseError(vpos, "chamber volume must be positive", std::to_string(v));
      live_.insert(name.first);
      ast_.declarations.push_back(ChamberDecl{pos, name.first, v});
    } else if (kw == "fill") {
      require_space(pos, kw);
      auto name = cur.ident("chamber name");
      if (!live_.count(name.first)) throw ParseError(name.second, "undeclared chamber", name.first);
      if (filled_.count(name.first)) throw ParseError(name.second, "chamber already filled", name.first);
      FillDecl decl{pos, name.first, {}, 0.0};
      cur.symbol('{');
      double sum = 0.0;
      do {
        if (!decl.parts.empty()) cur.symbol(',');
        auto gas = cur.ident("gas name");
        if (!gases_.count(gas.first)) throw ParseError(gas.second, "undeclared gas", gas.first);
        cur.symbol(':');
        const SourcePos wpos = cur.here();
        const double w = cur.real();
        if (!(w > 0.0)) throw ParseError(wpos, "fill weight must be positive", std::to_string(w));
        sum += w;
        decl.parts.emplace_back(gas.first, w);
      } while (cur.is_symbol(','));
      cur.symbol('}');
      if (std::abs(sum - 1.0) > 1e-9) {
        throw ParseError(pos, "fill weights sum to " + std::to_string(sum) + ", expected 1",
                         name.first);
      }
      cur.keyword("moles");
      const SourcePos mpos = cur.here();
      decl.moles = cur.real();
      if (!(decl.moles > 0.0)) {
        throw ParseError(mpos, "moles must be positive", std::to_string(decl.moles));
      }
      filled_.insert(name.first);
      ast_.declarations.push_back(std::move(decl));
    }
  }

  std::string use_chamber(LineCursor& cur) {
    auto id = cur.ident("chamber name");
    if (!live_.count(id.first)) {
      throw ParseError(id.second, "undeclared or already consumed chamber", id.first);
    }
    return id.first;
  }

  // Consumes `gone`, then registers `made`; produced names must be free.
  void flow(std::vector<std::string> gone,
            const std::vector<std::pair<std::string, SourcePos>>& made) {
    for (const auto& g : gone) live_.erase(g);
    std::set<std::string> seen;
    for (const auto& [name, p] : made) {
      if (live_.count(name) || !seen.insert(name).second) {
        throw ParseError(p, "chamber name already in use", name);
      }
    }
    for (const auto& [name, p] : made) live_.insert(name);
  }

  PovmRef povm_ref(LineCursor& cur) {
    PovmRef ref{cur.here(), {}, std::nullopt};
    cur.keyword("povm");
    std::vector<std::vector<std::pair<std::string, SourcePos>>> effects;
    cur.symbol('{');
    do {
      if (!effects.empty()) cur.symbol(',');
      std::vector<std::pair<std::string, SourcePos>> group{cur.ident("ket name")};
      while (cur.is_symbol('+')) {
        cur.symbol('+');
        group.push_back(cur.ident("ket name"));
      }
      effects.push_back(std::move(group));
    } while (cur.is_symbol(','));
    cur.symbol('}');
    std::size_t dim = lab_dim();
    if (cur.is_keyword("lift")) {
      cur.keyword("lift");
      auto obs = cur.ident("observer name");
      auto it = observers_.find(obs.first);
      if (it == observers_.end()) throw ParseError(obs.second, "undeclared observer", obs.first);
      dim = it->second;
      ref.lift = obs.first;
    }
    for (const auto& group : effects) {
      std::vector<std::string> names;
      for (const auto& id : group) {
        ket_ref(id, dim, ref.lift ? "lifted POVM" : "POVM");
        names.push_back(id.first);
      }
      ref.effects.push_back(std::move(names));
    }
    return ref;
  }

  void step(LineCursor& cur, const std::string& kw, SourcePos pos) {
    cur.next(kw);
    if (kw == "mix") {
      MixStep s;
      s.pos = pos;
      const SourcePos apos = cur.here();
      s.a = use_chamber(cur);
      s.b = use_chamber(cur);
      if (s.a == s.b) throw ParseError(apos, "cannot mix a chamber with itself", s.a);
      cur.keyword("into");
      auto into = cur.ident("chamber name");
      s.into = into.first;
      cur.keyword("by");
      s.povm = povm_ref(cur);
      flow({s.a, s.b}, {into});
      ast_.steps.push_back(std::move(s));
    } else if (kw == "separate") {
      SeparateStep s;
      s.pos = pos;
      s.chamber = use_chamber(cur);
      cur.keyword("by");
      if (cur.is_keyword("eigenbasis")) {
        cur.keyword("eigenbasis");
      } else {
        s.povm = povm_ref(cur);
        if (s.povm->effects.size() != 2) {
          throw ParseError(s.povm->pos,
                           "separate needs a two-outcome POVM, got " +
                               std::to_string(s.povm->effects.size()) + " outcomes",
                           "povm");
        }
      }
      cur.keyword("into");
      auto first = cur.ident("chamber name");
      auto second = cur.ident("chamber name");
      s.first = first.first;
      s.second = second.first;
      flow({s.chamber}, {first, second});
      ast_.steps.push_back(std::move(s));
    } else if (kw == "rotate") {
      RotateStep s;
      s.pos = pos;
      s.chamber = use_chamber(cur);
      cur.keyword("map");
      cur.symbol('{');
      do {
        if (!s.mapping.empty()) cur.symbol(',');
        auto from = cur.ident("ket name");
        cur.arrow();
        auto to = cur.ident("ket name");
        ket_ref(from, lab_dim(), "rotation");
        ket_ref(to, lab_dim(), "rotation");
        s.mapping.emplace_back(from.first, to.first);
      } while (cur.is_symbol(','));
      cur.symbol('}');
      ast_.steps.push_back(std::move(s));
    } else if (kw == "partition") {
      PartitionStep s;
      s.pos = pos;
      s.chamber = use_chamber(cur);
      cur.keyword("at");
      const SourcePos fpos = cur.here();
      s.fraction = cur.real();
      if (!(s.fraction > 0.0 && s.fraction < 1.0)) {
        throw ParseError(fpos, "partition fraction must lie strictly between 0 and 1",
                         std::to_string(s.fraction));
      }
      cur.keyword("into");
      auto first = cur.ident("chamber name");
      auto second = cur.ident("chamber name");
      s.first = first.first;
      s.second = second.first;
      flow({s.chamber}, {first, second});
      ast_.steps.push_back(std::move(s));
    } else if (kw == "join") {
      JoinStep s;
      s.pos = pos;
      const SourcePos apos = cur.here();
      s.a = use_chamber(cur);
      s.b = use_chamber(cur);
      if (s.a == s.b) throw ParseError(apos, "cannot join a chamber with itself", s.a);
      cur.keyword("into");
      auto into = cur.ident("chamber name");
      s.into = into.first;
      flow({s.a, s.b}, {into});
      ast_.steps.push_back(std::move(s));
    } else if (kw == "checkpoint") {
      auto label = cur.ident("checkpoint label");
      if (!checkpoints_.insert(label.first).second) {
        throw ParseError(label.second, "duplicate checkpoint", label.first);
      }
      ast_.steps.push_back(CheckpointStep{pos, label.first});
    } else {
      auto obs = cur.ident("observer name");
      if (!observers_.count(obs.first)) throw ParseError(obs.second, "undeclared observer", obs.first);
      cur.keyword("from");
      auto cp = cur.ident("checkpoint label");
      if (!checkpoints_.count(cp.first)) throw ParseError(cp.second, "unknown checkpoint", cp.first);
      if (kw == "audit") {
        ast_.steps.push_back(AuditStep{pos, obs.first, cp.first});
      } else {
        ast_.steps.push_back(AssertClosedStep{pos, obs.first, cp.first});
      }
    }
  }

  ProtocolAst ast_;
  std::optional<SpaceDecl> space_;
  bool have_temp_ = false;
  int last_line_ = 0;
  std::map<std::string, KetInfo> kets_;
  std::set<std::string> gases_;
  std::map<std::string, std::size_t> observers_;
  std::set<std::string> live_;
  std::set<std::string> filled_;
  std::set<std::string> checkpoints_;
};

}  // namespace detail

/// Parses a protocol, stopping at the first error.
inline ProtocolAst parse(std::string_view source) { return detail::Parser().run(source); }

// ---------------------------------------------------------------------------
// Canonical rendering

namespace detail {

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);
  return buf;
}

inline std::string complex_text(Complex c) {
  if (c.imag() == 0.0) return num(c.real());
  std::string s = num(c.real());
  s += c.imag() < 0.0 ? "-" : "+";
  s += num(std::abs(c.imag())) + "i";
  return s;
}

template <class T, class F>
std::string joined(const std::vector<T>& xs, const char* sep, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += f(xs[i]);
  }
  return out;
}

inline std::string pair_list(const std::vector<std::pair<std::string, std::string>>& xs) {
  return joined(xs, ", ", [](const auto& p) { return p.first + " -> " + p.second; });
}

inline std::string povm_text(const PovmRef& p) {
  std::string s = "povm { " +
                  joined(p.effects, ", ",
                         [](const std::vector<std::string>& g) {
                           return joined(g, " + ", [](const std::string& k) { return k; });
                         }) +
                  " }";
  if (p.lift) s += " lift " + *p.lift;
  return s;
}

struct Renderer {
  std::string operator()(const SpaceDecl& d) const {
    return "space " + d.name + " dim " + std::to_string(d.dim);
  }
  std::string operator()(const TempDecl& d) const { return "temp " + num(d.value); }
  std::string operator()(const KetDecl& d) const {
    return "ket " + d.name + " = [" + joined(d.amplitudes, ", ", complex_text) + "]";
  }
  std::string operator()(const GasFromKet& d) const {
    return "gas " + d.name + " from ket " + d.ket;
  }
  std::string operator()(const GasMatrix& d) const {
    return "gas " + d.name + " matrix [" +
           joined(d.rows, ", ",
                  [](const std::vector<Complex>& r) {
                    return "[" + joined(r, ", ", complex_text) + "]";
                  }) +
           "]";
  }
  std::string operator()(const ObserverDecl& d) const {
    return "observer " + d.name + " table { " + pair_list(d.table) + " } dim " +
           std::to_string(d.dim);
  }
  std::string operator()(const ChamberDecl& d) const {
    return "chamber " + d.name + " volume " + num(d.volume);
  }
  std::string operator()(const FillDecl& d) const {
    return "fill " + d.chamber + " { " +
           joined(d.parts, ", ",
                  [](const std::pair<std::string, double>& p) {
                    return p.first + ": " + num(p.second);
                  }) +
           " } moles " + num(d.moles);
  }
  std::string operator()(const MixStep& s) const {
    return "mix " + s.a + " " + s.b + " into " + s.into + " by " + povm_text(s.povm);
  }
  std::string operator()(const SeparateStep& s) const {
    return "separate " + s.chamber + " by " + (s.povm ? povm_text(*s.povm) : "eigenbasis") +
           " into " + s.first + " " + s.second;
  }
  std::string operator()(const RotateStep& s) const {
    return "rotate " + s.chamber + " map { " + pair_list(s.mapping) + " }";
  }
  std::string operator()(const PartitionStep& s) const {
    return "partition " + s.chamber + " at " + num(s.fraction) + " into " + s.first + " " +
           s.second;
  }
  std::string operator()(const JoinStep& s) const {
    return "join " + s.a + " " + s.b + " into " + s.into;
  }
  std::string operator()(const CheckpointStep& s) const { return "checkpoint " + s.label; }
  std::string operator()(const AssertClosedStep& s) const {
    return "assert-closed " + s.observer + " from " + s.checkpoint;
  }
  std::string operator()(const AuditStep& s) const {
    return "audit " + s.observer + " from " + s.checkpoint;
  }
};

}  // namespace detail

inline std::string render(const Declaration& d) { return std::visit(detail::Renderer{}, d); }
inline std::string render(const Step& s) { return std::visit(detail::Renderer{}, s); }

/// Canonical text: one statement per line, no comments, numbers at full
/// precision.
inline std::string render(const ProtocolAst& ast) {
  std::string out;
  for (const auto& d : ast.declarations) out += render(d) + "\n";
  for (const auto& s : ast.steps) out += render(s) + "\n";
  return out;
}

}  // namespace qtherm::protocol
