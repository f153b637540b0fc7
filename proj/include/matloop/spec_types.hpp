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

#ifndef MATLOOP_SPEC_TYPES_HPP_
#define MATLOOP_SPEC_TYPES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "matloop/json_util.hpp"
#include "matloop/properties.hpp"
#include "matloop/relax.hpp"

namespace matloop {

using calc::Category;

inline constexpr const char* kSchemaVersion = "1.0";

struct Hypothesis {
  std::string id;
  std::string text;
  std::string submitted_at;  // ISO-8601 UTC
};

Json to_json(const Hypothesis& h);
Hypothesis hypothesis_from_json(const Json& j);

enum class Property { kCohesiveEnergyPerAtom, kBulkModulus, kLatticeConstant };
enum class ClaimForm { kThreshold, kRelational };
enum class Comparator { kGreaterThan, kLessThan, kWithin };
enum class Intent { kVerify, kCompare, kScreen };

std::string to_string(Property p);
std::string to_string(ClaimForm f);
std::string to_string(Comparator c);
std::string to_string(Intent i);
Property property_from_string(const std::string& s);
Comparator comparator_from_string(const std::string& s);
Intent intent_from_string(const std::string& s);

// Machine name ("bulk_modulus"), unit ("GPa") and category of a property.
std::string unit_of(Property p);
Category category_of(Property p);
std::string phrase_of(Property p);  // "bulk modulus"

struct Quantity {
  double value;
  std::string unit;
  bool operator==(const Quantity&) const = default;
};

struct Claim {
  Property property = Property::kBulkModulus;
  std::string subject;
  Comparator comparator = Comparator::kGreaterThan;
  // Threshold form carries a Quantity, relational form a material key.
  std::variant<Quantity, std::string> reference;
  // Required iff comparator is kWithin; in the property's unit.
  std::optional<double> tolerance;

  ClaimForm form() const {
    return std::holds_alternative<Quantity>(reference) ? ClaimForm::kThreshold : ClaimForm::kRelational;
  }
  const std::string* reference_material() const { return std::get_if<std::string>(&reference); }
  const Quantity* reference_value() const { return std::get_if<Quantity>(&reference); }

  bool operator==(const Claim&) const = default;
};

// Returns a description of the first violated invariant, or nullopt.
std::optional<std::string> claim_violation(const Claim& c);

Json to_json(const Claim& c);
Claim claim_from_json(const Json& j);

struct CanonicalHypothesis {
  std::string id;
  std::string hypothesis_id;
  Intent intent = Intent::kVerify;
  std::vector<std::string> research_questions;
  Claim claim;
  std::vector<std::string> target_materials;
  Category category = Category::kMechanical;

  bool operator==(const CanonicalHypothesis&) const = default;
};

Json to_json(const CanonicalHypothesis& c);
CanonicalHypothesis canonical_from_json(const Json& j);
std::optional<std::string> canonical_violation(const CanonicalHypothesis& c);

struct MaterialRecord {
  std::string key;
  std::string formula;
  std::string cif_text;
  std::string provenance;

  bool operator==(const MaterialRecord&) const = default;
};

Json to_json(const MaterialRecord& m);
MaterialRecord material_from_json(const Json& j);

struct CalculatorConfig {
  std::string model = "lj-toy";
  std::string precision = "float64";
  std::string device = "cpu";
  std::int64_t seed = 42;
  bool operator==(const CalculatorConfig&) const = default;
};

struct ResolvedSpec {
  CalculatorConfig calculator;
  calc::TaskParams task;
};

Json to_json(const ResolvedSpec& r);
ResolvedSpec resolved_from_json(const Json& j);

// Partial ResolvedSpec; absent fields take the defaults.
struct SpecOverrides {
  std::optional<std::string> model;
  std::optional<std::string> precision;
  std::optional<std::string> device;
  std::optional<std::int64_t> seed;
  std::optional<std::string> optimizer;
  std::optional<double> fmax;
  std::optional<int> max_steps;
  std::optional<bool> cell_relax;
};

// Accepts flat ({"fmax": ..}) or nested ({"task": {"fmax": ..}}) objects.
// errors: InvalidOverrides for type errors
SpecOverrides overrides_from_json(const Json& j);
Json to_json(const SpecOverrides& o);

enum class FailureStage { kMaterialResolution, kSpecResolution, kSchemaValidation, kParse, kSimulation };

std::string to_string(FailureStage s);
FailureStage stage_from_string(const std::string& s);

struct UnitFailure {
  std::string unit_id;   // "m{i}-t{j}", or empty when no unit was formed
  std::string material;  // material key
  FailureStage stage = FailureStage::kSimulation;
  std::string message;
  bool recoverable = false;

  bool operator==(const UnitFailure&) const = default;
};

Json to_json(const UnitFailure& f);
UnitFailure failure_from_json(const Json& j);

struct ExecutionUnit {
  std::string unit_id;
  MaterialRecord material;
  int trial_index = 0;
  ResolvedSpec resolved;
  std::int64_t perturbation_seed = 0;
  Category category = Category::kMechanical;
};

Json to_json(const ExecutionUnit& u);
ExecutionUnit unit_from_json(const Json& j);

struct ExperimentSpec {
  std::string schema_version = kSchemaVersion;
  std::string spec_id;
  std::string canonical_ref;
  std::vector<ExecutionUnit> units;
  std::vector<UnitFailure> failures;
};

Json to_json(const ExperimentSpec& s);
ExperimentSpec spec_from_json(const Json& j);

std::string make_unit_id(int material_index, int trial_index);
// Parses "m{i}-t{j}"; nullopt on any other shape.
std::optional<std::pair<int, int>> parse_unit_id(const std::string& id);
// Orders "m2-t0" before "m10-t0"; unparseable ids sort last, lexicographically.
bool unit_id_less(const std::string& a, const std::string& b);

}  // namespace matloop

#endif  // MATLOOP_SPEC_TYPES_HPP_
