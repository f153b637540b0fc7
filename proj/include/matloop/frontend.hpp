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

#ifndef MATLOOP_FRONTEND_HPP_
#define MATLOOP_FRONTEND_HPP_

#include <string>
#include <variant>
#include <vector>

#include "matloop/agents.hpp"
#include "matloop/grammar.hpp"
#include "matloop/registry.hpp"
#include "matloop/spec_types.hpp"

namespace matloop::frontend {

enum class CanonicalizeMode { kGrammar, kAgent };

// errors: EmptyHypothesis, GrammarMismatch, AgentOutputInvalid
// Agent mode asks `agent` for role "canonicalizer" with context
// {"role", "hypothesis_text"} and checks the returned claim against the
// same invariants as the grammar path.
CanonicalHypothesis canonicalize(const Hypothesis& hypothesis, CanonicalizeMode mode = CanonicalizeMode::kGrammar,
                                 discussion::Agent* agent = nullptr);

// Builds the canonical form of an already-validated claim.
CanonicalHypothesis canonical_from_claim(const Claim& claim, const std::string& hypothesis_id,
                                         std::vector<std::string> research_questions = {});

using MaterialResolution = std::variant<MaterialRecord, UnitFailure>;

// One entry per target material, in order; unknown keys become
// UnitFailure{material_resolution} without affecting the others.
std::vector<MaterialResolution> resolve_materials(const CanonicalHypothesis& canonical,
                                                  const MaterialRegistry& registry);

// Defaults: lj-toy, float64, cpu, seed 42, fire, fmax 0.05, 500 steps, cell relax.
std::variant<ResolvedSpec, UnitFailure> resolve_spec(const CanonicalHypothesis& canonical,
                                                     const SpecOverrides& overrides = {});

inline constexpr int kDefaultTrials = 3;

// Cartesian product material × trial. Unit "m{i}-t{j}" gets perturbation
// seed base_seed + 1000·i + j with i the material's position in
// target_materials. Failed materials (or a failed spec resolution) yield one
// UnitFailure per would-be trial. The result is validated before it is
// returned; units that fail validation move to `failures` with stage
// schema_validation.
// errors: InvalidTrialCount
ExperimentSpec assemble_units(const CanonicalHypothesis& canonical, const std::vector<MaterialResolution>& materials,
                              const std::variant<ResolvedSpec, UnitFailure>& resolved, int n_trials);

}  // namespace matloop::frontend

#endif  // MATLOOP_FRONTEND_HPP_
