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

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "qtherm/audit.hpp"
#include "qtherm/demos.hpp"
#include "qtherm/interpreter.hpp"
#include "qtherm/protocol.hpp"
#include "qtherm/records.hpp"

namespace qtherm::cli {

enum class Command { run, demo, list_demos };
enum class Format { table, records };

struct CliConfig {
  Command command = Command::list_demos;
  /// File path for `run`, demo name for `demo`.
  std::string input;
  Format format = Format::table;
  double tol = kDefaultTol;
  std::optional<std::string> observer;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAssertClosed = 2;

/// Runs one command. Reports go to `out`, diagnostics to `err`. Apparent
/// violations are results, not failures: only errors and failed
/// assert-closed steps give a non-zero exit.
inline int run_command(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (!(config.tol > 0.0)) {
    err << "error: --tol must be positive\n";
    return kExitError;
  }
  if (config.command == Command::list_demos ||
      (config.command == Command::demo && config.input == "list-demos")) {
    for (const auto& d : demos::all()) out << d.name << "\n";
    return kExitOk;
  }

  std::string source;
  std::string origin;
  if (config.command == Command::run) {
    std::ifstream in(config.input, std::ios::binary);
    if (!in) {
      err << "error: cannot read '" << config.input << "'\n";
      return kExitError;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    source = ss.str();
    origin = config.input;
  } else {
    const auto demo = demos::find(config.input);
    if (!demo) {
      err << "error: unknown demo '" << config.input << "' (try list-demos)\n";
      return kExitError;
    }
    source = std::string(demo->source);
    origin = std::string(demo->name);
  }

  try {
    const auto ast = protocol::parse(source);
    if (config.observer) {
      bool known = false;
      for (const auto& d : ast.declarations)
        if (const auto* o = std::get_if<protocol::ObserverDecl>(&d); o && o->name == *config.observer)
          known = true;
      if (!known) {
        err << "error: " << origin << ": no observer named '" << *config.observer << "'\n";
        return kExitError;
      }
    }
    const auto result = protocol::execute(ast, config.tol);
    out << (config.format == Format::records ? records::render_records(result, config.observer)
                                              : records::render_table(result, config.observer));
    return kExitOk;
  } catch (const protocol::ParseError& e) {
    err << origin << ":" << e.line() << ":" << e.column() << ": parse error: " << e.message();
    if (!e.token().empty()) err << " (at '" << e.token() << "')";
    err << "\n";
    return kExitError;
  } catch (const protocol::AssertClosedError& e) {
    err << origin << ": " << e.what() << "\n";
    return kExitAssertClosed;
  } catch (const Error& e) {
    err << origin << ": runtime error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace qtherm::cli
