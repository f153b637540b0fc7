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

#ifndef MATLOOP_RUN_UNIT_HPP_
#define MATLOOP_RUN_UNIT_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "matloop/potential.hpp"
#include "matloop/properties.hpp"
#include "matloop/spec_types.hpp"

namespace matloop::calc {

inline constexpr const char* kCodeVersion = "matloop-0.1.0";

// Half-width of the per-component trial displacement, Å.
inline constexpr double kTrialDisplacement = 0.01;

struct RelaxationSummary {
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double max_force = 0.0;
  int steps_taken = 0;
  bool converged = false;
  Structure final_structure;
};

struct Provenance {
  std::string model;
  std::string precision;
  std::string device;
  std::int64_t seed = 0;
  std::int64_t perturbation_seed = 0;
  std::string code_version = kCodeVersion;
};

struct SimulationResult {
  std::string unit_id;
  std::string material;
  int trial_index = 0;
  PropertyMap properties;
  RelaxationSummary relaxation;
  Provenance provenance;
  double wall_time_ms = 0.0;
};

using UnitOutcome = std::variant<SimulationResult, UnitFailure>;

Json to_json(const SimulationResult& r);
SimulationResult result_from_json(const Json& j);
// Results carry "status": "ok", failures "status": "failed".
Json to_json(const UnitOutcome& o);
UnitOutcome outcome_from_json(const Json& j);
Json to_json(const std::vector<UnitOutcome>& outcomes);
std::vector<UnitOutcome> outcomes_from_json(const Json& j);

const std::string& unit_id_of(const UnitOutcome& o);
void sort_by_unit_id(std::vector<UnitOutcome>& outcomes);

// Seeded uniform displacement in [-kTrialDisplacement, kTrialDisplacement]
// per Cartesian component; trial 0 is returned unchanged.
Structure perturb(const Structure& s, int trial_index, std::int64_t perturbation_seed);

// CIF -> perturbation -> relaxation -> properties for the unit's category.
// Never throws for per-unit problems: CIF errors become stage "parse",
// non-convergence and numerical failures stage "simulation".
UnitOutcome run_unit(const ExecutionUnit& unit, const PotentialParams& params);
// Uses the parameters registered for unit.resolved.calculator.model.
UnitOutcome run_unit(const ExecutionUnit& unit);

}  // namespace matloop::calc

#endif  // MATLOOP_RUN_UNIT_HPP_
