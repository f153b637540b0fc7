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

#include "matloop/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "matloop/error.hpp"
#include "matloop/potential.hpp"
#include "matloop/schema.hpp"

namespace matloop::frontend {
namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

CanonicalHypothesis canonical_from_claim(const Claim& claim, const std::string& hypothesis_id,
                                         std::vector<std::string> research_questions) {
  CanonicalHypothesis c;
  c.id = "ch-" + hex16(fnv1a64(canonical_dump(to_json(claim))));
  c.hypothesis_id = hypothesis_id;
  c.intent = claim.form() == ClaimForm::kThreshold ? Intent::kVerify : Intent::kCompare;
  c.research_questions = research_questions.empty() ? std::vector<std::string>{research_question(claim)}
                                                    : std::move(research_questions);
  c.claim = claim;
  c.target_materials.push_back(claim.subject);
  if (const auto* ref = claim.reference_material()) c.target_materials.push_back(*ref);
  c.category = category_of(claim.property);
  return c;
}

CanonicalHypothesis canonicalize(const Hypothesis& hypothesis, CanonicalizeMode mode, discussion::Agent* agent) {
  if (blank(hypothesis.text)) throw Error("EmptyHypothesis", "hypothesis text is empty");
  if (mode == CanonicalizeMode::kGrammar) return canonical_from_claim(parse_claim(hypothesis.text), hypothesis.id);

  if (!agent) throw Error("AgentOutputInvalid", "agent mode requires an agent");
  Json doc;
  try {
    doc = agent->respond(discussion::kCanonicalizer,
                         {{"role", discussion::kCanonicalizer}, {"hypothesis_text", hypothesis.text}});
  } catch (const std::exception& e) {
    throw Error("AgentOutputInvalid", std::string("agent failed: ") + e.what());
  }
  if (auto problem = discussion::validate_argument(discussion::kCanonicalizer, doc))
    throw Error("AgentOutputInvalid", *problem);
  Claim claim;
  try {
    claim = claim_from_json(doc.at("claim"));
  } catch (const Error& e) {
    throw Error("AgentOutputInvalid", e.what());
  }
  if (auto v = claim_violation(claim)) throw Error("AgentOutputInvalid", *v);
  auto canonical = canonical_from_claim(claim, hypothesis.id,
                                        doc.at("research_questions").get<std::vector<std::string>>());
  if (doc.contains("intent")) {
    try {
      canonical.intent = intent_from_string(doc.at("intent").get<std::string>());
    } catch (const Error& e) {
      throw Error("AgentOutputInvalid", e.what());
    }
  }
  if (auto v = canonical_violation(canonical)) throw Error("AgentOutputInvalid", *v);
  return canonical;
}

std::vector<MaterialResolution> resolve_materials(const CanonicalHypothesis& canonical,
                                                  const MaterialRegistry& registry) {
  std::vector<MaterialResolution> out;
  for (const auto& key : canonical.target_materials) {
    if (auto rec = registry.find(key))
      out.emplace_back(std::move(*rec));
    else
      out.emplace_back(UnitFailure{"", key, FailureStage::kMaterialResolution,
                                   "material '" + key + "' not found in registry", false});
  }
  return out;
}

std::variant<ResolvedSpec, UnitFailure> resolve_spec(const CanonicalHypothesis&, const SpecOverrides& o) {
  ResolvedSpec r;
  if (o.model) r.calculator.model = *o.model;
  if (o.precision) r.calculator.precision = *o.precision;
  if (o.device) r.calculator.device = *o.device;
  if (o.seed) r.calculator.seed = *o.seed;
  if (o.optimizer) r.task.optimizer = *o.optimizer;
  if (o.fmax) r.task.fmax = *o.fmax;
  if (o.max_steps) r.task.max_steps = *o.max_steps;
  if (o.cell_relax) r.task.cell_relax = *o.cell_relax;

  auto fail = [](const std::string& msg) {
    return UnitFailure{"", "", FailureStage::kSpecResolution, msg, false};
  };
  if (!calc::is_known_model(r.calculator.model)) return fail("unknown calculator model '" + r.calculator.model + "'");
  if (r.calculator.precision != "float32" && r.calculator.precision != "float64")
    return fail("precision must be float32 or float64, got '" + r.calculator.precision + "'");
  if (r.calculator.device.empty()) return fail("device must be non-empty");
  if (r.task.optimizer != "fire") return fail("unknown optimizer '" + r.task.optimizer + "'");
  if (!(r.task.fmax > 0.0) || !std::isfinite(r.task.fmax))
    return fail("fmax must be > 0 eV/Å, got " + format_number(r.task.fmax));
  if (r.task.max_steps < 1) return fail("max_steps must be >= 1, got " + std::to_string(r.task.max_steps));
  return r;
}

ExperimentSpec assemble_units(const CanonicalHypothesis& canonical, const std::vector<MaterialResolution>& materials,
                              const std::variant<ResolvedSpec, UnitFailure>& resolved, int n_trials) {
  if (n_trials < 1) throw Error("InvalidTrialCount", "n_trials must be >= 1");
  ExperimentSpec spec;
  spec.canonical_ref = canonical.id;
  const auto* rs = std::get_if<ResolvedSpec>(&resolved);
  for (std::size_t i = 0; i < materials.size(); ++i) {
    const auto* rec = std::get_if<MaterialRecord>(&materials[i]);
    const std::string key = rec ? rec->key : std::get<UnitFailure>(materials[i]).material;
    for (int j = 0; j < n_trials; ++j) {
      const std::string id = make_unit_id(static_cast<int>(i), j);
      if (const auto* f = std::get_if<UnitFailure>(&materials[i])) {
        UnitFailure copy = *f;
        copy.unit_id = id;
        copy.material = key;
        spec.failures.push_back(std::move(copy));
      } else if (!rs) {
        UnitFailure copy = std::get<UnitFailure>(resolved);
        copy.unit_id = id;
        copy.material = key;
        spec.failures.push_back(std::move(copy));
      } else {
        ExecutionUnit u;
        u.unit_id = id;
        u.material = std::get<MaterialRecord>(materials[i]);
        u.trial_index = j;
        u.resolved = *rs;
        u.perturbation_seed = rs->calculator.seed + 1000 * static_cast<std::int64_t>(i) + j;
        u.category = canonical.category;
        spec.units.push_back(std::move(u));
      }
    }
  }

  auto finalize_id = [&] {
    spec.spec_id.clear();
    Json j = to_json(spec);
    j.erase("spec_id");
    spec.spec_id = "spec-" + hex16(fnv1a64(canonical_dump(j)));
  };
  finalize_id();
  auto diags = validate_spec(to_json(spec));
  if (diags.empty()) return spec;

  // Units implicated by a diagnostic are replaced by schema_validation failures.
  std::map<std::size_t, std::string> bad;
  for (const auto& d : diags) {
    if (d.path.rfind("/units/", 0) != 0) continue;
    const std::size_t k = std::stoul(d.path.substr(7));
    bad.emplace(k, d.rule + " at " + d.path + ": " + d.message);
  }
  std::vector<ExecutionUnit> kept;
  for (std::size_t k = 0; k < spec.units.size(); ++k) {
    if (auto it = bad.find(k); it != bad.end())
      spec.failures.push_back({spec.units[k].unit_id, spec.units[k].material.key, FailureStage::kSchemaValidation,
                               it->second, false});
    else
      kept.push_back(std::move(spec.units[k]));
  }
  spec.units = std::move(kept);
  finalize_id();
  diags = validate_spec(to_json(spec));
  if (!diags.empty())
    throw Error("SchemaValidationFailure", "assembled spec violates its schema: " + diags.front().path + " " +
                                               diags.front().message);
  return spec;
}

}  // namespace matloop::frontend
