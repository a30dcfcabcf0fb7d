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

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qtherm/cli.hpp"

int main(int argc, char** argv) {
  using qtherm::cli::CliConfig;
  using qtherm::cli::Command;
  using qtherm::cli::Format;

  CLI::App app{"Quantum ideal-gas cycles: run protocols, replay demos, audit heat ledgers"};
  app.require_subcommand(1);

  CliConfig config;
  std::string observer;
  const std::map<std::string, Format> formats{{"table", Format::table},
                                              {"records", Format::records}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", config.format, "table or records")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_option("--tol", config.tol, "audit and closure tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--observer", observer, "only report this observer's views and verdicts");
  };

  auto* run = app.add_subcommand("run", "execute a protocol file");
  run->add_option("file", config.input, "protocol file")->required();
  add_common(run);

  auto* demo = app.add_subcommand("demo", "replay a bundled demo (or 'demo list-demos')");
  demo->add_option("name", config.input, "demo name")->required();
  add_common(demo);

  auto* list = app.add_subcommand("list-demos", "list the bundled demos");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qtherm::cli::kExitError;
  }

  if (run->parsed()) config.command = Command::run;
  if (demo->parsed()) config.command = Command::demo;
  if (list->parsed()) config.command = Command::list_demos;
  if (!observer.empty()) config.observer = observer;
  return qtherm::cli::run_command(config, std::cout, std::cerr);
}
