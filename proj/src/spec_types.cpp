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

#include "matloop/spec_types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>

#include "matloop/error.hpp"

namespace matloop {

Json to_json(const Hypothesis& h) {
  return {{"id", h.id}, {"text", h.text}, {"submitted_at", h.submitted_at}};
}

Hypothesis hypothesis_from_json(const Json& j) {
  return {j.at("id").get<std::string>(), j.at("text").get<std::string>(),
          j.value("submitted_at", std::string())};
}

std::string to_string(Property p) {
  switch (p) {
    case Property::kCohesiveEnergyPerAtom: return "cohesive_energy_per_atom";
    case Property::kBulkModulus: return "bulk_modulus";
    case Property::kLatticeConstant: return "lattice_constant";
  }
  return "";
}

std::string to_string(ClaimForm f) { return f == ClaimForm::kThreshold ? "threshold" : "relational"; }

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::kGreaterThan: return "GT";
    case Comparator::kLessThan: return "LT";
    case Comparator::kWithin: return "WITHIN";
  }
  return "";
}

std::string to_string(Intent i) {
  switch (i) {
    case Intent::kVerify: return "verify";
    case Intent::kCompare: return "compare";
    case Intent::kScreen: return "screen";
  }
  return "";
}

Property property_from_string(const std::string& s) {
  if (s == "cohesive_energy_per_atom") return Property::kCohesiveEnergyPerAtom;
  if (s == "bulk_modulus") return Property::kBulkModulus;
  if (s == "lattice_constant") return Property::kLatticeConstant;
  throw Error("InvalidClaim", "unknown property '" + s + "'");
}

Comparator comparator_from_string(const std::string& s) {
  if (s == "GT") return Comparator::kGreaterThan;
  if (s == "LT") return Comparator::kLessThan;
  if (s == "WITHIN") return Comparator::kWithin;
  throw Error("InvalidClaim", "unknown comparator '" + s + "'");
}

Intent intent_from_string(const std::string& s) {
  if (s == "verify") return Intent::kVerify;
  if (s == "compare") return Intent::kCompare;
  if (s == "screen") return Intent::kScreen;
  throw Error("InvalidClaim", "unknown intent '" + s + "'");
}

std::string unit_of(Property p) {
  switch (p) {
    case Property::kCohesiveEnergyPerAtom: return "eV/atom";
    case Property::kBulkModulus: return "GPa";
    case Property::kLatticeConstant: return "Å";
  }
  return "";
}

Category category_of(Property p) {
  switch (p) {
    case Property::kCohesiveEnergyPerAtom: return Category::kEnergetic;
    case Property::kBulkModulus: return Category::kMechanical;
    case Property::kLatticeConstant: return Category::kStructural;
  }
  return Category::kMechanical;
}

std::string phrase_of(Property p) {
  switch (p) {
    case Property::kCohesiveEnergyPerAtom: return "cohesive energy per atom";
    case Property::kBulkModulus: return "bulk modulus";
    case Property::kLatticeConstant: return "lattice constant";
  }
  return "";
}

std::optional<std::string> claim_violation(const Claim& c) {
  if (c.subject.empty()) return "claim subject is empty";
  if (const auto* q = c.reference_value()) {
    if (q->unit != unit_of(c.property))
      return "reference unit '" + q->unit + "' does not match " + unit_of(c.property);
    if (!std::isfinite(q->value)) return "reference value is not finite";
  } else {
    const auto& m = *c.reference_material();
    if (m.empty()) return "reference material is empty";
    if (m == c.subject) return "relational claim must reference a distinct material";
  }
  if (c.comparator == Comparator::kWithin) {
    if (!c.tolerance) return "WITHIN requires a tolerance";
    if (!(*c.tolerance >= 0.0) || !std::isfinite(*c.tolerance)) return "tolerance must be >= 0";
  } else if (c.tolerance) {
    return "tolerance is only allowed with WITHIN";
  }
  return std::nullopt;
}

Json to_json(const Claim& c) {
  Json j{{"property", to_string(c.property)},
         {"form", to_string(c.form())},
         {"subject", c.subject},
         {"comparator", to_string(c.comparator)}};
  if (const auto* q = c.reference_value())
    j["reference"] = {{"value", q->value}, {"unit", q->unit}};
  else
    j["reference"] = {{"material", *c.reference_material()}};
  if (c.tolerance) j["tolerance"] = *c.tolerance;
  return j;
}

Claim claim_from_json(const Json& j) {
  try {
    Claim c;
    c.property = property_from_string(j.at("property").get<std::string>());
    c.subject = j.at("subject").get<std::string>();
    c.comparator = comparator_from_string(j.at("comparator").get<std::string>());
    const auto& ref = j.at("reference");
    if (ref.contains("material"))
      c.reference = ref.at("material").get<std::string>();
    else
      c.reference = Quantity{ref.at("value").get<double>(), ref.at("unit").get<std::string>()};
    if (j.contains("tolerance") && !j.at("tolerance").is_null()) c.tolerance = j.at("tolerance").get<double>();
    if (j.contains("form") && j.at("form").get<std::string>() != to_string(c.form()))
      throw Error("InvalidClaim", "claim form does not match its reference");
    return c;
  } catch (const Json::exception& e) {
    throw Error("InvalidClaim", std::string("malformed claim: ") + e.what());
  }
}

Json to_json(const CanonicalHypothesis& c) {
  return {{"id", c.id},
          {"hypothesis_id", c.hypothesis_id},
          {"intent", to_string(c.intent)},
          {"research_questions", c.research_questions},
          {"claim", to_json(c.claim)},
          {"target_materials", c.target_materials},
          {"category", calc::to_string(c.category)}};
}

CanonicalHypothesis canonical_from_json(const Json& j) {
  CanonicalHypothesis c;
  c.id = j.at("id").get<std::string>();
  c.hypothesis_id = j.value("hypothesis_id", std::string());
  c.intent = intent_from_string(j.at("intent").get<std::string>());
  c.research_questions = j.at("research_questions").get<std::vector<std::string>>();
  c.claim = claim_from_json(j.at("claim"));
  c.target_materials = j.at("target_materials").get<std::vector<std::string>>();
  c.category = calc::category_from_string(j.at("category").get<std::string>());
  return c;
}

std::optional<std::string> canonical_violation(const CanonicalHypothesis& c) {
  if (auto v = claim_violation(c.claim)) return v;
  if (c.research_questions.empty()) return "at least one research question is required";
  if (c.target_materials.empty()) return "at least one target material is required";
  auto listed = [&](const std::string& k) {
    return std::find(c.target_materials.begin(), c.target_materials.end(), k) != c.target_materials.end();
  };
  if (!listed(c.claim.subject)) return "claim subject missing from target_materials";
  if (const auto* m = c.claim.reference_material(); m && !listed(*m))
    return "claim reference missing from target_materials";
  if (c.category != category_of(c.claim.property)) return "category does not match the claim property";
  return std::nullopt;
}

Json to_json(const MaterialRecord& m) {
  return {{"key", m.key}, {"formula", m.formula}, {"cif_text", m.cif_text}, {"provenance", m.provenance}};
}

MaterialRecord material_from_json(const Json& j) {
  return {j.at("key").get<std::string>(), j.at("formula").get<std::string>(),
          j.at("cif_text").get<std::string>(), j.at("provenance").get<std::string>()};
}

Json to_json(const ResolvedSpec& r) {
  return {{"calculator",
           {{"model", r.calculator.model},
            {"precision", r.calculator.precision},
            {"device", r.calculator.device},
            {"seed", r.calculator.seed}}},
          {"task",
           {{"optimizer", r.task.optimizer},
            {"fmax", r.task.fmax},
            {"max_steps", r.task.max_steps},
            {"cell_relax", r.task.cell_relax}}}};
}

ResolvedSpec resolved_from_json(const Json& j) {
  ResolvedSpec r;
  const auto& c = j.at("calculator");
  r.calculator.model = c.at("model").get<std::string>();
  r.calculator.precision = c.at("precision").get<std::string>();
  r.calculator.device = c.at("device").get<std::string>();
  r.calculator.seed = c.at("seed").get<std::int64_t>();
  const auto& t = j.at("task");
  r.task.optimizer = t.at("optimizer").get<std::string>();
  r.task.fmax = t.at("fmax").get<double>();
  r.task.max_steps = t.at("max_steps").get<int>();
  r.task.cell_relax = t.at("cell_relax").get<bool>();
  return r;
}

SpecOverrides overrides_from_json(const Json& j) {
  if (j.is_null()) return {};
  if (!j.is_object()) throw Error("InvalidOverrides", "overrides must be an object");
  SpecOverrides o;
  auto take = [&](const Json& src, const char* key, auto& slot, auto check) {
    if (!src.contains(key)) return;
    const auto& v = src.at(key);
    if (!check(v)) throw Error("InvalidOverrides", std::string("override '") + key + "' has the wrong type");
    slot = v.template get<typename std::remove_reference_t<decltype(slot)>::value_type>();
  };
  auto is_str = [](const Json& v) { return v.is_string(); };
  auto is_num = [](const Json& v) { return v.is_number(); };
  auto is_int = [](const Json& v) { return v.is_number_integer(); };
  auto is_bool = [](const Json& v) { return v.is_boolean(); };
  const Json& calc = j.contains("calculator") ? j.at("calculator") : j;
  const Json& task = j.contains("task") ? j.at("task") : j;
  take(calc, "model", o.model, is_str);
  take(calc, "precision", o.precision, is_str);
  take(calc, "device", o.device, is_str);
  take(calc, "seed", o.seed, is_int);
  take(task, "optimizer", o.optimizer, is_str);
  take(task, "fmax", o.fmax, is_num);
  take(task, "max_steps", o.max_steps, is_int);
  take(task, "cell_relax", o.cell_relax, is_bool);
  return o;
}

Json to_json(const SpecOverrides& o) {
  Json j = Json::object();
  if (o.model) j["model"] = *o.model;
  if (o.precision) j["precision"] = *o.precision;
  if (o.device) j["device"] = *o.device;
  if (o.seed) j["seed"] = *o.seed;
  if (o.optimizer) j["optimizer"] = *o.optimizer;
  if (o.fmax) j["fmax"] = *o.fmax;
  if (o.max_steps) j["max_steps"] = *o.max_steps;
  if (o.cell_relax) j["cell_relax"] = *o.cell_relax;
  return j;
}

std::string to_string(FailureStage s) {
  switch (s) {
    case FailureStage::kMaterialResolution: return "material_resolution";
    case FailureStage::kSpecResolution: return "spec_resolution";
    case FailureStage::kSchemaValidation: return "schema_validation";
    case FailureStage::kParse: return "parse";
    case FailureStage::kSimulation: return "simulation";
  }
  return "";
}

FailureStage stage_from_string(const std::string& s) {
  if (s == "material_resolution") return FailureStage::kMaterialResolution;
  if (s == "spec_resolution") return FailureStage::kSpecResolution;
  if (s == "schema_validation") return FailureStage::kSchemaValidation;
  if (s == "parse") return FailureStage::kParse;
  if (s == "simulation") return FailureStage::kSimulation;
  throw Error("InvalidFailure", "unknown failure stage '" + s + "'");
}

Json to_json(const UnitFailure& f) {
  return {{"unit_id", f.unit_id},
          {"material", f.material},
          {"stage", to_string(f.stage)},
          {"message", f.message},
          {"recoverable", f.recoverable}};
}

UnitFailure failure_from_json(const Json& j) {
  return {j.value("unit_id", std::string()), j.value("material", std::string()),
          stage_from_string(j.at("stage").get<std::string>()), j.at("message").get<std::string>(),
          j.at("recoverable").get<bool>()};
}

Json to_json(const ExecutionUnit& u) {
  return {{"unit_id", u.unit_id},
          {"material", to_json(u.material)},
          {"trial_index", u.trial_index},
          {"resolved", to_json(u.resolved)},
          {"perturbation_seed", u.perturbation_seed},
          {"category", calc::to_string(u.category)}};
}

ExecutionUnit unit_from_json(const Json& j) {
  ExecutionUnit u;
  u.unit_id = j.at("unit_id").get<std::string>();
  u.material = material_from_json(j.at("material"));
  u.trial_index = j.at("trial_index").get<int>();
  u.resolved = resolved_from_json(j.at("resolved"));
  u.perturbation_seed = j.at("perturbation_seed").get<std::int64_t>();
  u.category = calc::category_from_string(j.at("category").get<std::string>());
  return u;
}

Json to_json(const ExperimentSpec& s) {
  Json units = Json::array();
  for (const auto& u : s.units) units.push_back(to_json(u));
  Json failures = Json::array();
  for (const auto& f : s.failures) failures.push_back(to_json(f));
  return {{"schema_version", s.schema_version},
          {"spec_id", s.spec_id},
          {"canonical_ref", s.canonical_ref},
          {"units", units},
          {"failures", failures}};
}

ExperimentSpec spec_from_json(const Json& j) {
  ExperimentSpec s;
  s.schema_version = j.at("schema_version").get<std::string>();
  s.spec_id = j.at("spec_id").get<std::string>();
  s.canonical_ref = j.at("canonical_ref").get<std::string>();
  for (const auto& u : j.at("units")) s.units.push_back(unit_from_json(u));
  for (const auto& f : j.at("failures")) s.failures.push_back(failure_from_json(f));
  return s;
}

std::string make_unit_id(int material_index, int trial_index) {
  return "m" + std::to_string(material_index) + "-t" + std::to_string(trial_index);
}

std::optional<std::pair<int, int>> parse_unit_id(const std::string& id) {
  static const std::regex re("^m(0|[1-9][0-9]{0,8})-t(0|[1-9][0-9]{0,8})$");
  std::smatch m;
  if (!std::regex_match(id, m, re)) return std::nullopt;
  return std::make_pair(std::stoi(m[1].str()), std::stoi(m[2].str()));
}

bool unit_id_less(const std::string& a, const std::string& b) {
  const auto pa = parse_unit_id(a), pb = parse_unit_id(b);
  if (pa && pb) return *pa < *pb;
  if (pa != pb) return pa.has_value();
  return a < b;
}

}  // namespace matloop
