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

// Bundled protocols. Sources are compiled in verbatim so that replays are
// byte-identical across builds.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qtherm::demos {

struct Demo {
  std::string_view name;
  std::string_view summary;
  std::string_view source;
};

namespace detail {

inline constexpr std::string_view kPerfectSeparation = R"(# Two orthogonal spin states are pulled apart by a z membrane.
space spin dim 2
ket z_plus = [1, 0]
ket z_minus = [0, 1]
gas up from ket z_plus
gas down from ket z_minus
observer lab table { z_plus -> z_plus, z_minus -> z_minus } dim 2
chamber A volume 1
fill A { up: 0.5, down: 0.5 } moles 1

checkpoint start
separate A by povm { z_plus, z_minus } into U L
audit lab from start
)";

inline constexpr std::string_view kPartialSeparation = R"(# Non-orthogonal z+ / x+ mixture, separated in the eigenbasis of its
# statistical matrix.
space spin dim 2
ket z_plus = [1, 0]
ket z_minus = [0, 1]
ket x_plus = [0.70710678118654752, 0.70710678118654752]
gas zg from ket z_plus
gas xg from ket x_plus
observer lab table { z_plus -> z_plus, z_minus -> z_minus } dim 2
chamber A volume 1
fill A { zg: 0.5, xg: 0.5 } moles 1

checkpoint start
separate A by eigenbasis into U L
audit lab from start
)";

// Shared 4-dimensional setup for the two Peres demos. Willard resolves a
// hidden label (prime / double prime) that Tatiana's spin table forgets.
inline constexpr std::string_view kPeresSetup = R"(space willard dim 4
ket zp_p = [1, 0, 0, 0]
ket zp_m = [0, 1, 0, 0]
ket zpp_p = [0, 0, 1, 0]
ket zpp_m = [0, 0, 0, 1]
ket xp_p = [0.70710678118654752, 0.70710678118654752, 0, 0]
ket xpp_p = [0, 0, 0.70710678118654752, 0.70710678118654752]
ket ap_p = [0.92387953251128674, 0.38268343236508978, 0, 0]
ket ap_m = [-0.38268343236508978, 0.92387953251128674, 0, 0]
ket app_p = [0, 0, 0.92387953251128674, 0.38268343236508978]
ket app_m = [0, 0, -0.38268343236508978, 0.92387953251128674]

# Tatiana's spin-1/2 description
ket z_p = [1, 0]
ket z_m = [0, 1]
ket a_p = [0.92387953251128674, 0.38268343236508978]
ket a_m = [-0.38268343236508978, 0.92387953251128674]

observer tatiana table { zp_p -> z_p, zp_m -> z_m, zpp_p -> z_p, zpp_m -> z_m } dim 2
observer willard table { zp_p -> zp_p, zp_m -> zp_m, zpp_p -> zpp_p, zpp_m -> zpp_m } dim 4

gas zgas from ket zp_p
gas xgas from ket xpp_p
chamber A volume 0.5
chamber B volume 0.5
fill A { zgas: 1 } moles 0.5
fill B { xgas: 1 } moles 0.5

# (a) z+ on the left, x+ on the right
checkpoint a
# (b) the hidden label makes the two gases orthogonal: mix reversibly
mix A B into C by povm { zp_p + zp_m, zpp_p + zpp_m }
# (c) Tatiana's optimal separation of the 50/50 z+/x+ mixture
separate C by povm { a_p, a_m } lift tatiana into U L
# (d) rotate both parts back to z+
rotate U map { ap_p -> zp_p, app_p -> zpp_p }
rotate L map { ap_m -> zp_p, app_m -> zpp_p }
join U L into C
# (e) split and turn one half into x+
partition C at 0.5 into A B
rotate B map { zp_p -> xp_p, zpp_p -> xpp_p }
# (f)
checkpoint f
)";

inline const std::string& peres_tatiana() {
  static const std::string text =
      "# Peres' cycle as Tatiana keeps the books.\n" +
      std::string(kPeresSetup) + R"(audit willard from a
assert-closed tatiana from a
audit tatiana from a
)";
  return text;
}

inline const std::string& peres_willard() {
  static const std::string text =
      "# Peres' cycle as Willard keeps the books, then completed.\n" +
      std::string(kPeresSetup) + R"(audit willard from a
# close the cycle: sort by hidden label and undo the label swaps
separate A by povm { zp_p + zp_m, zpp_p + zpp_m } into A1 A2
separate B by povm { zp_p + zp_m, zpp_p + zpp_m } into B1 B2
rotate A2 map { zpp_p -> zp_p }
rotate B1 map { xp_p -> xpp_p }
join A1 A2 into A
join B1 B2 into B
audit willard from f
audit willard from a
)";
  return text;
}

inline constexpr std::string_view kJaynesSetup = R"(space argon dim 2
ket a_ar = [1, 0]
ket b_ar = [0, 1]
ket ar = [1]
observer johann table { a_ar -> ar, b_ar -> ar } dim 1
observer marie table { a_ar -> a_ar, b_ar -> b_ar } dim 2
gas a_gas from ket a_ar
gas b_gas from ket b_ar
chamber A volume 0.5
chamber B volume 0.5
fill A { a_gas: 1 } moles 0.5
fill B { b_gas: 1 } moles 0.5

# (a)
checkpoint a
# (b) Marie's membranes tell the two argons apart
mix A B into C by povm { a_ar, b_ar }
# (c)
partition C at 0.5 into A B
audit marie from a
)";

inline const std::string& jaynes_johann() {
  static const std::string text =
      "# Jaynes' two argons, booked by Johann who cannot tell them apart.\n" +
      std::string(kJaynesSetup) + R"(assert-closed johann from a
audit johann from a
)";
  return text;
}

inline const std::string& jaynes_marie() {
  static const std::string text =
      "# Jaynes' two argons, completed by Marie.\n" +
      std::string(kJaynesSetup) + R"(separate A by povm { a_ar, b_ar } into A1 A2
separate B by povm { a_ar, b_ar } into B1 B2
join A1 B1 into A
join A2 B2 into B
audit marie from a
)";
  return text;
}

}  // namespace detail

inline const std::vector<Demo>& all() {
  static const std::vector<Demo> registry = {
      {"perfect-separation", "orthogonal mixture separated by a z membrane",
       detail::kPerfectSeparation},
      {"partial-separation", "z+/x+ mixture separated in its eigenbasis",
       detail::kPartialSeparation},
      {"peres-tatiana", "Peres' cycle audited by the coarse observer", detail::peres_tatiana()},
      {"peres-willard", "Peres' cycle audited and completed by the fine observer",
       detail::peres_willard()},
      {"jaynes-johann", "two argons audited by the observer who cannot tell them apart",
       detail::jaynes_johann()},
      {"jaynes-marie", "two argons audited and re-separated by the fine observer",
       detail::jaynes_marie()},
  };
  return registry;
}

inline std::optional<Demo> find(std::string_view name) {
  for (const auto& d : all())
    if (d.name == name) return d;
  return std::nullopt;
}

}  // namespace qtherm::demos
