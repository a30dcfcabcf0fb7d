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

#include <gtest/gtest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "qtherm/thermo.hpp"
#include "support.hpp"

namespace qtherm {
namespace {

using testing::Rng;

const double kH = 1.0 / std::sqrt(2.0);

StatisticalMatrix pure(const Ket& k) { return StatisticalMatrix::pure(k); }

Povm z_povm() {
  const std::vector<Ket> z{Ket::basis(2, 0), Ket::basis(2, 1)};
  return Povm::projective(z);
}

LabState one_chamber(std::vector<GasComponent> contents, double volume = 1.0) {
  LabState lab;
  lab.chambers.push_back({"A", volume, std::move(contents)});
  return lab;
}

TEST(IsothermalWork, DoublingVolume) {
  EXPECT_NEAR(isothermal_work(1.0, 1.0, 0.5, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(isothermal_work(2.0, 3.0, 1.0, 0.5), -6.0 * std::log(2.0), 1e-14);
  EXPECT_THROW(isothermal_work(0.0, 1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(isothermal_work(1.0, 1.0, -1.0, 1.0), DomainError);
}

TEST(Separate, PerfectSeparationReleasesLn2) {
  const LabState lab =
      one_chamber({{pure(Ket::basis(2, 0)), 0.5}, {pure(Ket::basis(2, 1)), 0.5}});
  const auto t = separate(lab, "A", z_povm(), {"U", "L"});
  EXPECT_NEAR(t.event.heat_absorbed_by_gas, -std::log(2.0), 1e-12);
  EXPECT_EQ(t.event.heat_absorbed_by_gas, t.event.work_done_by_gas);
  ASSERT_EQ(t.lab.chambers.size(), 2u);
  EXPECT_EQ(t.lab.chambers[0].name, "U");
  EXPECT_NEAR(t.lab.chambers[0].volume, 0.5, 1e-15);
  EXPECT_NEAR(t.lab.chambers[1].total_moles(), 0.5, 1e-15);
}

TEST(Separate, PartialSeparationOfZAndX) {
  const LabState lab = one_chamber({{pure(Ket::basis(2, 0)), 0.5}, {pure(Ket{kH, kH}), 0.5}});
  const double c = std::cos(M_PI / 8), s = std::sin(M_PI / 8);
  const std::vector<Ket> alpha{Ket{c, s}, Ket{-s, c}};
  const auto t = separate(lab, "A", Povm::projective(alpha), {"U", "L"});
  // Independent closed form: p = cos^2(pi/8), q = sin^2(pi/8).
  const double p = c * c, q = s * s;
  EXPECT_NEAR(t.lab.chambers[0].volume, p, 1e-12);
  EXPECT_NEAR(t.lab.chambers[1].volume, q, 1e-12);
  EXPECT_NEAR(t.event.heat_absorbed_by_gas, p * std::log(p) + q * std::log(q), 1e-12);
}

TEST(Separate, ZeroOutcomeProducesNoChamber) {
  const LabState lab = one_chamber({{pure(Ket::basis(2, 0)), 1.0}});
  const auto t = separate(lab, "A", z_povm(), {"U", "L"});
  ASSERT_EQ(t.lab.chambers.size(), 1u);
  EXPECT_EQ(t.lab.chambers[0].name, "U");
  EXPECT_EQ(t.event.heat_absorbed_by_gas, 0.0);
  EXPECT_FALSE(std::signbit(t.event.heat_absorbed_by_gas));
}

TEST(Separate, Errors) {
  const LabState lab = one_chamber({{pure(Ket::basis(2, 0)), 1.0}});
  EXPECT_THROW(separate(lab, "Z", z_povm()), NameError);
  EXPECT_THROW(separate(lab, "A", z_povm(), {"only"}), NameError);
  EXPECT_THROW(separate(lab, "A", Povm::identity(3)), DimensionError);
  LabState empty = one_chamber({});
  EXPECT_THROW(separate(empty, "A", z_povm()), EmptyChamberError);
}

TEST(Mix, OrthogonalGasesAbsorbLn2) {
  LabState lab;
  lab.chambers.push_back({"A", 0.5, {{pure(Ket::basis(2, 0)), 0.5}}});
  lab.chambers.push_back({"B", 0.5, {{pure(Ket::basis(2, 1)), 0.5}}});
  const auto t = mix(lab, "A", "B", z_povm(), "C");
  EXPECT_NEAR(t.event.heat_absorbed_by_gas, std::log(2.0), 1e-12);
  ASSERT_EQ(t.lab.chambers.size(), 1u);
  EXPECT_EQ(t.lab.chambers[0].name, "C");
  EXPECT_NEAR(t.lab.chambers[0].volume, 1.0, 1e-15);
}

TEST(Mix, IndistinguishableGasesAreRejected) {
  LabState lab;
  lab.chambers.push_back({"A", 0.5, {{pure(Ket::basis(2, 0)), 0.5}}});
  lab.chambers.push_back({"B", 0.5, {{pure(Ket{kH, kH}), 0.5}}});
  EXPECT_THROW(mix(lab, "A", "B", z_povm()), IndistinguishableError);
  EXPECT_THROW(mix(lab, "A", "A", z_povm()), NameError);
}

TEST(Rotate, MapsZToXWithoutHeat) {
  const LabState lab = one_chamber({{pure(Ket::basis(2, 0)), 1.0}});
  const std::vector<std::pair<Ket, Ket>> m{{Ket::basis(2, 0), Ket{kH, kH}}};
  const auto t = rotate(lab, "A", m);
  EXPECT_EQ(t.event.heat_absorbed_by_gas, 0.0);
  EXPECT_LT(max_abs_diff(t.lab.chambers[0].contents[0].state.matrix(), Ket{kH, kH}.projector()),
            1e-15);
}

TEST(Rotate, RejectsNonUnitaryMapping) {
  const LabState lab = one_chamber({{pure(Ket::basis(2, 0)), 1.0}});
  const std::vector<std::pair<Ket, Ket>> m{{Ket::basis(2, 0), Ket::basis(2, 0)},
                                           {Ket::basis(2, 1), Ket{kH, kH}}};
  EXPECT_THROW(rotate(lab, "A", m), UnitaryError);
}

TEST(UnitaryFromMapping, CompletesToAUnitary) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix u = testing::random_unitary(4, rng);
    std::vector<std::pair<Ket, Ket>> m;
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<Complex> col(4);
      for (std::size_t i = 0; i < 4; ++i) col[i] = u(i, j);
      m.emplace_back(Ket::basis(4, j), Ket(col));
    }
    const ComplexMatrix w = unitary_from_mapping(m, 4);
    EXPECT_LT(max_abs_diff(w.adjoint() * w, ComplexMatrix::identity(4)), 1e-10);
    for (const auto& [from, to] : m) {
      const ComplexMatrix image = conjugate(w, from.projector());
      EXPECT_LT(max_abs_diff(image, to.projector()), 1e-10);
    }
  }
}

TEST(PartitionJoin, RoundTripIsHeatFree) {
  const LabState lab = one_chamber({{pure(Ket::basis(2, 0)), 1.0}}, 2.0);
  const auto p = partition(lab, "A", 0.25, "L", "R");
  EXPECT_NEAR(p.lab.chambers[0].volume, 0.5, 1e-15);
  EXPECT_NEAR(p.lab.chambers[1].total_moles(), 0.75, 1e-15);
  const auto j = join(p.lab, "L", "R", "A");
  EXPECT_NEAR(j.lab.chambers[0].volume, 2.0, 1e-15);
  EXPECT_NEAR(j.lab.chambers[0].total_moles(), 1.0, 1e-15);
  ASSERT_EQ(j.lab.chambers[0].contents.size(), 1u);  // merged
  EXPECT_THROW(partition(lab, "A", 1.0), DomainError);
  EXPECT_THROW(partition(lab, "A", 0.0), DomainError);
}

TEST(Ledger, EnforcesFirstLawAndOrder) {
  Ledger ledger;
  ledger.append({1, EventKind::mix, 1.0, 1.0, "ok"});
  EXPECT_THROW(ledger.append({2, EventKind::mix, 1.0, 0.5, "bad"}), LedgerError);
  EXPECT_THROW(ledger.append({1, EventKind::mix, 0.0, 0.0, "stale"}), LedgerError);
  LabState lab;
  ledger.checkpoint("a", lab, 2);
  EXPECT_THROW(ledger.checkpoint("a", lab, 3), NameError);
  ledger.append({4, EventKind::separate, -0.25, -0.25, "s"});
  EXPECT_DOUBLE_EQ(ledger.heat_since("a"), -0.25);
  EXPECT_THROW(ledger.heat_since("zz"), NameError);
}

// Mixing two orthogonal gases at equal pressure and separating them again
// restores the lab with zero net heat.
TEST(ThermoProperty, MixThenSeparateIsReversible) {
  Rng rng(1001);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = trial % 2 ? 4 : 2;
    const ComplexMatrix w = testing::random_unitary(dim, rng);
    std::vector<Complex> c0(dim), c1(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      c0[i] = w(i, 0);
      c1[i] = w(i, 1);
    }
    const Ket a(c0), b(c1);
    const double na = u(rng), nb = u(rng), pressure = u(rng);
    LabState lab;
    lab.temperature = u(rng);
    lab.lab_dim = dim;
    lab.chambers.push_back({"A", na / pressure, {{pure(a), na}}});
    lab.chambers.push_back({"B", nb / pressure, {{pure(b), nb}}});
    const ComplexMatrix pa = a.projector();
    const Povm povm({pa, ComplexMatrix::identity(dim) - pa});

    const auto mixed = mix(lab, "A", "B", povm, "C");
    const auto split = separate(mixed.lab, "C", povm, {"A", "B"});
    EXPECT_GE(mixed.event.heat_absorbed_by_gas, 0.0);
    EXPECT_LE(split.event.heat_absorbed_by_gas, 0.0);
    EXPECT_NEAR(mixed.event.heat_absorbed_by_gas + split.event.heat_absorbed_by_gas, 0.0, 1e-9);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(split.lab.chambers[i].volume, lab.chambers[i].volume, 1e-9);
      EXPECT_LT(max_abs_diff(split.lab.chambers[i].aggregate(), lab.chambers[i].aggregate()),
                1e-9);
    }
  }
}

// No measurement tells two non-orthogonal states apart with certainty, so
// mix must refuse every membrane offered.
TEST(ThermoProperty, NoPerfectDiscriminationOfNonOrthogonalPairs) {
  Rng rng(2002);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = trial % 2 ? 4 : 2;
    const Ket a = testing::random_ket(dim, rng);
    const Ket b = testing::random_ket(dim, rng);
    const double overlap = std::abs(inner(a, b));
    ASSERT_GT(overlap, 1e-6);
    LabState lab;
    lab.lab_dim = dim;
    lab.chambers.push_back({"A", 0.5, {{pure(a), 0.5}}});
    lab.chambers.push_back({"B", 0.5, {{pure(b), 0.5}}});

    const std::vector<WeightedState> pair{{0.5, pure(a)}, {0.5, pure(b)}};
    const Povm best = optimal_separation_povm(pair);
    EXPECT_THROW(mix(lab, "A", "B", best), IndistinguishableError) << "trial " << trial;
    const Povm random = testing::random_povm(dim, 2, rng);
    EXPECT_THROW(mix(lab, "A", "B", random), IndistinguishableError) << "trial " << trial;

    // Outcome statistics of any POVM obey sum_i sqrt(p_i q_i) >= |<a|b>|.
    const auto pa = measure(random, pure(a));
    const auto pb = measure(random, pure(b));
    double bc = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i)
      bc += std::sqrt(pa[i].probability * pb[i].probability);
    EXPECT_GE(bc, overlap - 1e-10);
  }
}

// Random operation sequences: every event satisfies Q == W, separate never
// absorbs heat, mix never releases it, and moles are conserved.
TEST(ThermoProperty, RandomSequencesKeepTheBooks) {
  Rng rng(3003);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    LabState lab;
    lab.temperature = 0.5 + u(rng);
    lab.chambers.push_back({"C0", 1.0,
                            {{testing::random_state(2, rng), u(rng)},
                             {testing::random_state(2, rng), u(rng)}}});
    const double n0 = lab.total_moles();
    Ledger ledger;
    int step = 0;
    int fresh = 1;
    for (int k = 0; k < 6; ++k) {
      const std::string target = lab.chambers[rng() % lab.chambers.size()].name;
      Transition t;
      switch (rng() % 3) {
        case 0: {
          const Povm p = testing::random_povm(2, 2, rng);
          t = separate(lab, target, p,
                       {"C" + std::to_string(fresh), "C" + std::to_string(fresh + 1)});
          fresh += 2;
          EXPECT_LE(t.event.heat_absorbed_by_gas, 0.0);
          break;
        }
        case 1: {
          const std::vector<std::pair<Ket, Ket>> m{
              {Ket::basis(2, 0), testing::random_ket(2, rng)}};
          t = rotate(lab, target, m);
          EXPECT_EQ(t.event.heat_absorbed_by_gas, 0.0);
          break;
        }
        default: {
          t = partition(lab, target, u(rng), "C" + std::to_string(fresh),
                        "C" + std::to_string(fresh + 1));
          fresh += 2;
          break;
        }
      }
      t.event.step_index = ++step;
      EXPECT_EQ(t.event.heat_absorbed_by_gas, t.event.work_done_by_gas);
      ledger.append(t.event);
      lab = std::move(t.lab);
    }
    EXPECT_NEAR(lab.total_moles(), n0, 1e-12);
    for (const auto& e : ledger.events()) EXPECT_EQ(e.heat_absorbed_by_gas, e.work_done_by_gas);
  }
}

}  // namespace
}  // namespace qtherm
