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

#include "matloop/run_unit.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "matloop/cif.hpp"
#include "matloop/error.hpp"

namespace matloop::calc {

using structure::operator+;
using structure::operator*;

Json to_json(const SimulationResult& r) {
  const auto& x = r.relaxation;
  return {{"status", "ok"},
          {"unit_id", r.unit_id},
          {"material", r.material},
          {"trial_index", r.trial_index},
          {"properties", to_json(r.properties)},
          {"relaxation",
           {{"initial_energy", x.initial_energy},
            {"final_energy", x.final_energy},
            {"max_force", x.max_force},
            {"steps_taken", x.steps_taken},
            {"converged", x.converged},
            {"final_structure", structure::to_json(x.final_structure)}}},
          {"provenance",
           {{"model", r.provenance.model},
            {"precision", r.provenance.precision},
            {"device", r.provenance.device},
            {"seed", r.provenance.seed},
            {"perturbation_seed", r.provenance.perturbation_seed},
            {"code_version", r.provenance.code_version}}},
          {"wall_time_ms", r.wall_time_ms}};
}

SimulationResult result_from_json(const Json& j) {
  SimulationResult r;
  r.unit_id = j.at("unit_id").get<std::string>();
  r.material = j.at("material").get<std::string>();
  r.trial_index = j.at("trial_index").get<int>();
  r.properties = property_map_from_json(j.at("properties"));
  const auto& x = j.at("relaxation");
  r.relaxation.initial_energy = x.at("initial_energy").get<double>();
  r.relaxation.final_energy = x.at("final_energy").get<double>();
  r.relaxation.max_force = x.at("max_force").get<double>();
  r.relaxation.steps_taken = x.at("steps_taken").get<int>();
  r.relaxation.converged = x.at("converged").get<bool>();
  r.relaxation.final_structure = structure::structure_from_json(x.at("final_structure"));
  const auto& p = j.at("provenance");
  r.provenance.model = p.at("model").get<std::string>();
  r.provenance.precision = p.at("precision").get<std::string>();
  r.provenance.device = p.at("device").get<std::string>();
  r.provenance.seed = p.at("seed").get<std::int64_t>();
  r.provenance.perturbation_seed = p.at("perturbation_seed").get<std::int64_t>();
  r.provenance.code_version = p.at("code_version").get<std::string>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  return r;
}

Json to_json(const UnitOutcome& o) {
  if (const auto* r = std::get_if<SimulationResult>(&o)) return to_json(*r);
  Json j = matloop::to_json(std::get<UnitFailure>(o));
  j["status"] = "failed";
  return j;
}

UnitOutcome outcome_from_json(const Json& j) {
  if (j.at("status").get<std::string>() == "ok") return result_from_json(j);
  return failure_from_json(j);
}

Json to_json(const std::vector<UnitOutcome>& outcomes) {
  Json arr = Json::array();
  for (const auto& o : outcomes) arr.push_back(to_json(o));
  return arr;
}

std::vector<UnitOutcome> outcomes_from_json(const Json& j) {
  std::vector<UnitOutcome> out;
  for (const auto& e : j) out.push_back(outcome_from_json(e));
  return out;
}

const std::string& unit_id_of(const UnitOutcome& o) {
  return std::visit([](const auto& v) -> const std::string& { return v.unit_id; }, o);
}

void sort_by_unit_id(std::vector<UnitOutcome>& outcomes) {
  std::stable_sort(outcomes.begin(), outcomes.end(), [](const UnitOutcome& a, const UnitOutcome& b) {
    return unit_id_less(unit_id_of(a), unit_id_of(b));
  });
}

Structure perturb(const Structure& s, int trial_index, std::int64_t perturbation_seed) {
  if (trial_index == 0) return s;
  std::mt19937_64 rng(static_cast<std::uint64_t>(perturbation_seed));
  auto cart = s.cartesian_coords();
  for (auto& x : cart)
    for (double& c : x) {
      // 53-bit uniform in [0, 1), independent of the standard library's distributions.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      c += (2.0 * u - 1.0) * kTrialDisplacement;
    }
  Structure out = s;
  out.set_cartesian(cart);
  return out;
}

UnitOutcome run_unit(const ExecutionUnit& unit, const PotentialParams& params) {
  const auto started = std::chrono::steady_clock::now();
  auto failure = [&](FailureStage stage, const std::string& msg, bool recoverable) {
    return UnitOutcome{UnitFailure{unit.unit_id, unit.material.key, stage, msg, recoverable}};
  };

  Structure s;
  try {
    s = structure::parse_cif(unit.material.cif_text);
  } catch (const Error& e) {
    return failure(FailureStage::kParse, e.what(), false);
  }

  SimulationResult r;
  r.unit_id = unit.unit_id;
  r.material = unit.material.key;
  r.trial_index = unit.trial_index;
  r.provenance = {unit.resolved.calculator.model, unit.resolved.calculator.precision,
                  unit.resolved.calculator.device, unit.resolved.calculator.seed,
                  unit.perturbation_seed, kCodeVersion};
  try {
    const Precision precision = precision_from_string(unit.resolved.calculator.precision);
    const Structure start = perturb(s, unit.trial_index, unit.perturbation_seed);
    const auto outcome = relax(start, params, unit.resolved.task, precision);
    r.relaxation = {outcome.initial_energy, outcome.final_energy, outcome.max_force,
                    outcome.steps_taken,    outcome.converged,    outcome.final_structure};
    if (!outcome.converged)
      return failure(FailureStage::kSimulation,
                     "relaxation did not converge in " + std::to_string(outcome.steps_taken) +
                         " steps (max force " + std::to_string(outcome.max_force) + " eV/Å)",
                     true);
    PropertyOptions opts;
    opts.atoms_per_conventional_cell = static_cast<int>(s.size());
    opts.precision = precision;
    r.properties = compute_properties(outcome, params, unit.category, opts);
  } catch (const Error& e) {
    return failure(FailureStage::kSimulation, e.code() + ": " + e.what(), false);
  }
  r.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return r;
}

UnitOutcome run_unit(const ExecutionUnit& unit) {
  if (!is_known_model(unit.resolved.calculator.model))
    return UnitFailure{unit.unit_id, unit.material.key, FailureStage::kSimulation,
                       "unknown calculator model '" + unit.resolved.calculator.model + "'", false};
  return run_unit(unit, params_for_model(unit.resolved.calculator.model));
}

}  // namespace matloop::calc
