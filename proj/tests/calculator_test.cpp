// Copyright 2026 The matloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "matloop/cif.hpp"
#include "matloop/eos.hpp"
#include "matloop/error.hpp"
#include "matloop/potential.hpp"
#include "matloop/properties.hpp"
#include "matloop/registry.hpp"
#include "matloop/relax.hpp"
#include "matloop/run_unit.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace matloop;
using namespace matloop::calc;
using structure::make_cluster;
using structure::Mat3;
using structure::Structure;
using structure::operator+;
using structure::operator-;

constexpr double kArEps = 0.0104;
constexpr double kArSigma = 3.40;

PotentialParams unbounded() {
  PotentialParams p = lj_toy();
  p.cutoff_factor = 1e6;
  p.shifted = false;
  return p;
}

Structure ar_fcc() { return structure::parse_cif(frontend::MaterialRegistry::builtin().find("Ar-fcc")->cif_text); }

TEST(EnergyForces, DimerAtAnalyticMinimum) {
  const double r = std::pow(2.0, 1.0 / 6.0) * kArSigma;
  const auto ef = energy_forces(make_cluster({"Ar", "Ar"}, {{0, 0, 0}, {r, 0, 0}}), unbounded());
  EXPECT_NEAR(ef.energy, -kArEps, 1e-12);
  for (const auto& f : ef.forces)
    for (double c : f) EXPECT_NEAR(c, 0.0, 1e-12);
}

TEST(EnergyForces, ZeroCrossingUnshifted) {
  PotentialParams p = lj_toy();
  p.shifted = false;
  EXPECT_NEAR(energy(make_cluster({"Ar", "Ar"}, {{0, 0, 0}, {kArSigma, 0, 0}}), p), 0.0, 1e-15);
}

TEST(EnergyForces, MatchesBruteForceEnergy) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Structure s = test_support::random_cell(rng, 8);
    EXPECT_NEAR(energy(s, lj_toy()),
                oracle::lj_energy(s.lattice, s.species, s.frac_coords),
                1e-10);
  }
}

TEST(EnergyForces, FiniteDifferenceForces) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 25; ++k) {
    const Structure s = test_support::random_cell(rng, 8);
    const double worst = test_support::force_fd_error(s, lj_toy(), 1e-5);
    EXPECT_LE(worst, 1e-6) << "config " << k;
  }
}

TEST(EnergyForces, ClusterInvariances) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 10; ++k) {
    std::vector<structure::Vec3> pos;
    std::vector<std::string> sp;
    while (pos.size() < 6) {
      const structure::Vec3 x{u(rng), u(rng), u(rng)};
      bool ok = true;
      for (const auto& y : pos) ok = ok && structure::norm(x - y) > 3.2;
      if (ok) {
        pos.push_back(x);
        sp.push_back(pos.size() % 2 ? "Ar" : "Kr");
      }
    }
    const auto base = energy_forces(make_cluster(sp, pos), lj_toy());
    structure::Vec3 net{0, 0, 0};
    for (const auto& f : base.forces) net = net + f;
    EXPECT_LT(structure::norm(net), 1e-10);

    std::vector<structure::Vec3> moved, rotated;
    const double c = std::cos(0.7), s = std::sin(0.7);
    for (const auto& x : pos) {
      moved.push_back(x + structure::Vec3{1.25, -0.5, 2.0});
      rotated.push_back({c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]});
    }
    EXPECT_NEAR(energy(make_cluster(sp, moved), lj_toy()), base.energy, 1e-12);
    EXPECT_NEAR(energy(make_cluster(sp, rotated), lj_toy()), base.energy, 1e-12);
  }
}

TEST(EnergyForces, SupercellExtensivity) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 5; ++k) {
    const Structure s = test_support::random_cell(rng, 4);
    const Structure big = structure::make_supercell(s, {2, 2, 2});
    EXPECT_NEAR(energy(big, lj_toy()) / big.size(), energy(s, lj_toy()) / s.size(), 1e-9);
  }
}

TEST(EnergyForces, Float32Truncates) {
  const double e64 = energy(ar_fcc(), lj_toy(), Precision::kFloat64);
  const double e32 = energy(ar_fcc(), lj_toy(), Precision::kFloat32);
  EXPECT_EQ(e32, static_cast<double>(static_cast<float>(e32)));
  EXPECT_NEAR(e32, e64, 1e-6 * std::abs(e64));
}

TEST(EnergyForces, UnknownSpecies) {
  try {
    energy(make_cluster({"Ar", "Ne"}, {{0, 0, 0}, {3, 0, 0}}), lj_toy());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UnknownSpecies");
  }
}

TEST(Potential, ParamsAndModels) {
  EXPECT_TRUE(is_known_model("lj-toy"));
  EXPECT_FALSE(is_known_model("sevennet"));
  EXPECT_THROW(params_for_model("nope"), Error);
  const PotentialParams p = params_from_json(to_json(lj_toy()));
  EXPECT_DOUBLE_EQ(p.species.at("Xe").epsilon, 0.0200);
  EXPECT_DOUBLE_EQ(p.species.at("Kr").sigma, 3.65);
  const auto m = mix(lj_toy().species.at("Ar"), lj_toy().species.at("Xe"));
  EXPECT_DOUBLE_EQ(m.epsilon, std::sqrt(0.0104 * 0.0200));
  EXPECT_DOUBLE_EQ(m.sigma, 0.5 * (3.40 + 3.98));
  PotentialParams bad = lj_toy();
  bad.species["Ar"].sigma = -1;
  EXPECT_THROW(check_params(bad), Error);
}

// Curvature of the Ar pair potential at its minimum, eV/Å^2.
double pair_curvature_at_minimum() {
  const double r = std::pow(2.0, 1.0 / 6.0) * kArSigma;
  return 4 * kArEps * (156 * std::pow(kArSigma, 12) / std::pow(r, 14) - 42 * std::pow(kArSigma, 6) / std::pow(r, 8));
}

double relaxed_dimer_offset(double fmax, double start) {
  TaskParams t;
  t.fmax = fmax;
  t.cell_relax = false;
  const auto out = relax(make_cluster({"Ar", "Ar"}, {{0, 0, 0}, {start, 0, 0}}), lj_toy(), t);
  EXPECT_TRUE(out.converged);
  const auto x = out.final_structure.cartesian_coords();
  return structure::norm(x[1] - x[0]) - std::pow(2.0, 1.0 / 6.0) * kArSigma;
}

// The stopping rule only bounds the distance to the minimum by fmax / k.
TEST(Relax, DimerStopsWithinTheForceBound) {
  const double k = pair_curvature_at_minimum();
  for (double start = 1.2; start < 1.8; start += 0.05)
    for (double fmax : {1e-3, 1e-4, 1e-5})
      EXPECT_LE(std::abs(relaxed_dimer_offset(fmax, start * kArSigma)), 1.02 * fmax / k) << start << " " << fmax;
}

TEST(Relax, DimerWithinMilliAngstromAtTightForce) {
  const double fmax = 0.9e-3 * pair_curvature_at_minimum();
  for (double start = 1.2; start < 1.8; start += 0.05)
    EXPECT_LE(std::abs(relaxed_dimer_offset(fmax, start * kArSigma)), 1e-3) << start;
}

TEST(Relax, BudgetExhaustion) {
  TaskParams t;
  t.fmax = 1e-4;
  t.max_steps = 1;
  t.cell_relax = false;
  const auto out = relax(make_cluster({"Ar", "Ar"}, {{0, 0, 0}, {1.5 * kArSigma, 0, 0}}), lj_toy(), t);
  EXPECT_FALSE(out.converged);
  EXPECT_EQ(out.steps_taken, 1);
}

TEST(Relax, EnergyTrajectoryIsMonotone) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 40; ++k) {
    const Structure s = test_support::random_cell(rng, 6);
    TaskParams t;
    t.fmax = 1e-3;
    t.cell_relax = k % 2 == 0;
    const auto out = relax(s, lj_toy(), t);
    for (std::size_t i = 1; i < out.trajectory_energies.size(); ++i)
      EXPECT_LE(out.trajectory_energies[i], out.trajectory_energies[i - 1]);
    EXPECT_LE(out.final_energy, out.initial_energy);
  }
}

TEST(Relax, UnsupportedOptimizer) {
  TaskParams t;
  t.optimizer = "bfgs";
  try {
    relax(ar_fcc(), lj_toy(), t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UnsupportedOptimizer");
  }
}

TEST(Relax, LatticeConstantMatchesBruteForceScan) {
  const auto out = relax(ar_fcc(), lj_toy(), TaskParams{});
  ASSERT_TRUE(out.converged);
  const double a = std::cbrt(out.final_structure.volume());
  const auto scan = oracle::fcc_scan("Ar", 0.9 * 5.40, 1.1 * 5.40, 10000);
  EXPECT_LE(std::abs(a - scan.a_min), scan.step) << "relaxed " << a << " scan " << scan.a_min;
}

double bm_energy(double v, double e0, double v0, double b0, double bp) {
  const double x = std::pow(v0 / v, 2.0 / 3.0) - 1.0;
  return e0 + 9.0 * v0 * b0 / 16.0 * (x * x * x * bp + x * x * (6.0 - 4.0 * (x + 1.0)));
}

TEST(Eos, RecoversSyntheticBirchMurnaghan) {
  const double e0 = -1.0, v0 = 40.0, b0 = 50.0 / kEvPerA3ToGPa, bp = 4.0;
  std::vector<double> vs, es;
  for (int k = -5; k <= 5; ++k) {
    vs.push_back(v0 * (1.0 + 0.012 * k));
    es.push_back(bm_energy(vs.back(), e0, v0, b0, bp));
  }
  const auto fit = fit_birch_murnaghan(vs, es);
  EXPECT_NEAR(fit.params.e0, e0, 1e-8 * std::abs(e0));
  EXPECT_NEAR(fit.params.v0, v0, 1e-8 * v0);
  EXPECT_NEAR(fit.params.b0 * kEvPerA3ToGPa, 50.0, 1e-8 * 50.0);
  EXPECT_NEAR(fit.params.b0_prime, bp, 1e-8 * bp);
}

TEST(Eos, RecoversOtherPrimeValues) {
  for (double bp : {3.0, 4.5, 6.0}) {
    std::vector<double> vs, es;
    for (int k = -5; k <= 5; ++k) {
      vs.push_back(25.0 * (1.0 + 0.01 * k));
      es.push_back(bm_energy(vs.back(), -3.0, 25.0, 0.5, bp));
    }
    EXPECT_NEAR(fit_birch_murnaghan(vs, es).params.b0_prime, bp, 1e-8 * bp);
  }
}

TEST(Eos, FailureModes) {
  const std::vector<double> few{1, 2, 3};
  EXPECT_THROW(fit_birch_murnaghan(few, few), Error);
  std::vector<double> vs, es;
  for (int k = 0; k < 11; ++k) {
    vs.push_back(10.0 + k);
    es.push_back(-0.1 * k);  // no minimum
  }
  try {
    fit_birch_murnaghan(vs, es);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "EOSFitFailure");
  }
}

TEST(Properties, DimerCohesiveEnergy) {
  TaskParams t;
  t.fmax = 1e-6;
  t.cell_relax = false;
  const auto out = relax(make_cluster({"Ar", "Ar"}, {{0, 0, 0}, {4.0, 0, 0}}), unbounded(), t);
  const auto props = compute_properties(out, unbounded(), Category::kEnergetic);
  EXPECT_NEAR(props.at("cohesive_energy_per_atom").value, -kArEps / 2.0, 1e-9);
  EXPECT_EQ(props.at("cohesive_energy_per_atom").unit, "eV/atom");
}

TEST(Properties, BulkModulusMatchesFiniteDifferenceCurvature) {
  const auto out = relax(ar_fcc(), lj_toy(), TaskParams{});
  const double b = compute_properties(out, lj_toy(), Category::kMechanical).at("bulk_modulus").value;
  const auto scan = oracle::fcc_scan("Ar", 0.9 * 5.40, 1.1 * 5.40, 10000);
  const double b_fd = oracle::fcc_bulk_modulus("Ar", scan.a_min) * kEvPerA3ToGPa;
  EXPECT_NEAR(b, b_fd, 0.02 * b_fd);
}

TEST(Properties, LatticeConstantAndUnits) {
  const auto out = relax(ar_fcc(), lj_toy(), TaskParams{});
  const auto p = compute_properties(out, lj_toy(), Category::kStructural);
  EXPECT_EQ(p.at("lattice_constant").unit, "Å");
  EXPECT_NEAR(p.at("lattice_constant").value, std::cbrt(out.final_structure.volume()), 1e-12);
  EXPECT_EQ(compute_properties(out, lj_toy(), Category::kMechanical).at("bulk_modulus").unit, "GPa");
}

TEST(Properties, NotConverged) {
  RelaxationOutcome o;
  o.converged = false;
  try {
    compute_properties(o, lj_toy(), Category::kEnergetic);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "NotConverged");
  }
}

TEST(Perturb, TrialZeroIsIdentityAndDisplacementsAreBounded) {
  const Structure s = ar_fcc();
  EXPECT_EQ(perturb(s, 0, 123), s);
  const Structure p = perturb(s, 2, 123);
  const auto a = s.cartesian_coords(), b = p.cartesian_coords();
  double moved = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      double d = b[i][k] - a[i][k];
      d -= 5.40 * std::round(d / 5.40);
      EXPECT_LE(std::abs(d), kTrialDisplacement + 1e-12);
      moved += std::abs(d);
    }
  EXPECT_GT(moved, 0.0);
  EXPECT_EQ(perturb(s, 2, 123), p);
  EXPECT_NE(perturb(s, 2, 124), p);
}

TEST(RunUnit, DeterministicApartFromWallTime) {
  const ExecutionUnit u = test_support::unit("Ar-fcc", 0, 1, Category::kMechanical);
  const Json a = strip_keys(to_json(run_unit(u)), {"wall_time_ms"});
  const Json b = strip_keys(to_json(run_unit(u)), {"wall_time_ms"});
  EXPECT_EQ(canonical_dump(a), canonical_dump(b));
  EXPECT_EQ(a.at("status"), "ok");
}

TEST(RunUnit, CorruptCifIsParseFailure) {
  ExecutionUnit u = test_support::unit("Ar-fcc", 0, 0, Category::kEnergetic);
  u.material.cif_text = "garbage";
  const auto o = run_unit(u);
  ASSERT_TRUE(std::holds_alternative<UnitFailure>(o));
  EXPECT_EQ(std::get<UnitFailure>(o).stage, FailureStage::kParse);
  EXPECT_EQ(std::get<UnitFailure>(o).unit_id, u.unit_id);
}

TEST(RunUnit, ComposesStandalonePieces) {
  const ExecutionUnit u = test_support::unit("Ar-fcc", 0, 0, Category::kMechanical);
  const auto o = run_unit(u);
  ASSERT_TRUE(std::holds_alternative<SimulationResult>(o));
  const auto out = relax(ar_fcc(), lj_toy(), u.resolved.task);
  const double standalone = compute_properties(out, lj_toy(), Category::kMechanical).at("bulk_modulus").value;
  EXPECT_DOUBLE_EQ(std::get<SimulationResult>(o).properties.at("bulk_modulus").value, standalone);
  EXPECT_EQ(std::get<SimulationResult>(o).provenance.code_version, kCodeVersion);
}

TEST(RunUnit, NonConvergenceIsRecoverableSimulationFailure) {
  ExecutionUnit u = test_support::unit("Ar-fcc", 0, 1, Category::kEnergetic);
  u.resolved.task.fmax = 1e-9;
  u.resolved.task.max_steps = 2;
  const auto o = run_unit(u);
  ASSERT_TRUE(std::holds_alternative<UnitFailure>(o));
  EXPECT_EQ(std::get<UnitFailure>(o).stage, FailureStage::kSimulation);
  EXPECT_TRUE(std::get<UnitFailure>(o).recoverable);
}

TEST(RunUnit, OutcomeJsonRoundTrip) {
  const auto o = run_unit(test_support::unit("Kr-fcc", 1, 2, Category::kStructural));
  EXPECT_EQ(canonical_dump(to_json(outcome_from_json(to_json(o)))), canonical_dump(to_json(o)));
}

}  // namespace
