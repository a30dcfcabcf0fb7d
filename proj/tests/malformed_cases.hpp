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

#include <string>
#include <vector>

namespace qtherm::testing {

struct MalformedCase {
  const char* name;
  std::string source;
  int line;  // where the error must be reported
};

inline const std::string kValidPrefix =
    "space s dim 2\n"
    "ket z0 = [1, 0]\n"
    "ket z1 = [0, 1]\n"
    "gas g0 from ket z0\n"
    "gas g1 from ket z1\n"
    "observer o table { z0 -> z0, z1 -> z1 } dim 2\n"
    "chamber A volume 1\n"
    "fill A { g0: 0.5, g1: 0.5 } moles 1\n";  // 8 lines

inline std::vector<MalformedCase> malformed_cases() {
  const std::string p = kValidPrefix;
  return {
      {"unknown_statement", p + "frobnicate A\n", 9},
      {"undeclared_chamber", p + "separate Q by eigenbasis into B C\n", 9},
      {"undeclared_ket_in_povm", p + "separate A by povm { z0, z9 } into B C\n", 9},
      {"separate_arity", p + "separate A by povm { z0, z1, z0 } into B C\n", 9},
      {"missing_into", p + "separate A by eigenbasis B C\n", 9},
      {"bad_character", p + "checkpoint a$\n", 9},
      {"malformed_number", p + "chamber B volume 1x\n", 9},
      {"duplicate_checkpoint", p + "checkpoint a\ncheckpoint a\n", 10},
      {"undeclared_observer", p + "checkpoint a\naudit nobody from a\n", 10},
      {"unknown_checkpoint", p + "checkpoint a\naudit o from nowhere\n", 10},
      {"declaration_after_step", p + "checkpoint a\nchamber B volume 1\n", 10},
      {"consumed_chamber", p + "partition A at 0.5 into B C\njoin A B into D\n", 10},
      {"partition_out_of_range", p + "partition A at 1.5 into B C\n", 9},
      {"ket_dimension_mismatch", p + "ket w = [1, 0, 0]\ngas gw from ket w\n", 10},
      {"fill_weights", p + "chamber B volume 1\nfill B { g0: 0.3, g1: 0.3 } moles 1\n", 10},
      {"missing_space", "ket z0 = [1, 0]\nchamber A volume 1\n", 2},
      {"duplicate_space", p + "space t dim 2\n", 9},
      {"gas_matrix_not_positive", p + "gas bad matrix [[2, 0], [0, -1]]\n", 9},
      {"observer_not_a_basis", p + "observer q table { z0 -> z0, z0 -> z1 } dim 2\n", 9},
      {"unterminated_map", p + "rotate A map { z0 -> z1\n", 9},
      {"reserved_word", p + "checkpoint into\n", 9},
      {"imaginary_dimension", "space s dim 2i\n", 1},
  };
}

}  // namespace qtherm::testing
