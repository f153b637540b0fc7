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

#include <functional>
#include <random>

#include "matloop/error.hpp"
#include "matloop/frontend.hpp"
#include "matloop/grammar.hpp"
#include "matloop/registry.hpp"
#include "matloop/schema.hpp"

namespace {

using namespace matloop;
using namespace matloop::frontend;

CanonicalHypothesis canon(const std::string& text) { return canonicalize({"h-1", text, "2026-01-01T00:00:00Z"}); }

ExperimentSpec assemble(const std::string& text, int trials, const SpecOverrides& o = {}) {
  const auto c = canon(text);
  return assemble_units(c, resolve_materials(c, MaterialRegistry::builtin()), resolve_spec(c, o), trials);
}

bool has_rule(const std::vector<Diagnostic>& d, const std::string& path, const std::string& rule) {
  for (const auto& x : d)
    if (x.path == path && x.rule == rule) return true;
  return false;
}

class FixedAgent : public discussion::Agent {
 public:
  explicit FixedAgent(Json reply) : reply_(std::move(reply)) {}
  Json respond(const std::string&, const Json& context) override {
    last_context = context;
    return reply_;
  }
  Json last_context;

 private:
  Json reply_;
};

TEST(Canonicalize, RelationalBulkModulus) {
  const auto c = canon("The bulk modulus of Kr-fcc is greater than that of Ar-fcc");
  EXPECT_EQ(c.claim.property, Property::kBulkModulus);
  EXPECT_EQ(c.claim.form(), ClaimForm::kRelational);
  EXPECT_EQ(c.claim.subject, "Kr-fcc");
  EXPECT_EQ(c.claim.comparator, Comparator::kGreaterThan);
  EXPECT_EQ(*c.claim.reference_material(), "Ar-fcc");
  EXPECT_EQ(c.category, Category::kMechanical);
  EXPECT_EQ(c.target_materials, (std::vector<std::string>{"Kr-fcc", "Ar-fcc"}));
  EXPECT_FALSE(c.research_questions.empty());
  EXPECT_EQ(c.hypothesis_id, "h-1");
}

TEST(Canonicalize, ThresholdCohesiveEnergy) {
  const auto c = canon("The cohesive energy per atom of Ar-fcc is less than -0.05 eV/atom");
  EXPECT_EQ(c.claim.property, Property::kCohesiveEnergyPerAtom);
  EXPECT_EQ(c.claim.form(), ClaimForm::kThreshold);
  EXPECT_EQ(c.claim.comparator, Comparator::kLessThan);
  EXPECT_EQ(*c.claim.reference_value(), (Quantity{-0.05, "eV/atom"}));
  EXPECT_EQ(c.category, Category::kEnergetic);
  EXPECT_EQ(c.target_materials, std::vector<std::string>{"Ar-fcc"});
}

TEST(Canonicalize, WithinAndSpellings) {
  const auto c = canon("the LATTICE CONSTANT of Ar-fcc is within 0.01 angstrom of 5.3 A.");
  EXPECT_EQ(c.claim.comparator, Comparator::kWithin);
  EXPECT_DOUBLE_EQ(*c.claim.tolerance, 0.01);
  EXPECT_EQ(c.claim.reference_value()->unit, "Å");
  EXPECT_EQ(c.category, Category::kStructural);
}

TEST(Canonicalize, EmptyAndBlank) {
  for (const char* t : {"", "   \t\n"}) {
    try {
      canon(t);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), "EmptyHypothesis");
    }
  }
}

TEST(Canonicalize, MismatchReportsPrefix) {
  try {
    canon("The bulk modulus of Kr-fcc is bigger than that of Ar-fcc");
    FAIL();
  } catch (const GrammarMismatch& e) {
    EXPECT_EQ(e.code(), "GrammarMismatch");
    EXPECT_EQ(e.matched_prefix(), "The bulk modulus of Kr-fcc");
  }
}

TEST(Canonicalize, RejectsInvariantViolations) {
  EXPECT_THROW(canon("The bulk modulus of Kr-fcc is greater than that of Kr-fcc"), Error);
  EXPECT_THROW(canon("The bulk modulus of Kr-fcc is greater than 3 eV/atom"), Error);
  EXPECT_THROW(canon("The bulk modulus of Kr-fcc is within -1 GPa of 3 GPa"), Error);
}

TEST(Canonicalize, AgentModeValidatesOutput) {
  const Claim claim = parse_claim("The bulk modulus of Xe-fcc is less than 3 GPa");
  FixedAgent good({{"role", "canonicalizer"}, {"claim", to_json(claim)}, {"research_questions", {"q?"}}});
  const auto c = canonicalize({"h-2", "free text about xenon", ""}, CanonicalizeMode::kAgent, &good);
  EXPECT_EQ(c.claim, claim);
  EXPECT_EQ(good.last_context.at("hypothesis_text"), "free text about xenon");

  Json bad_claim = to_json(claim);
  bad_claim["tolerance"] = 0.5;  // tolerance without WITHIN
  FixedAgent bad({{"role", "canonicalizer"}, {"claim", bad_claim}, {"research_questions", {"q?"}}});
  try {
    canonicalize({"h-3", "x", ""}, CanonicalizeMode::kAgent, &bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "AgentOutputInvalid");
  }
  FixedAgent junk(Json("not an object"));
  EXPECT_THROW(canonicalize({"h-4", "x", ""}, CanonicalizeMode::kAgent, &junk), Error);
}

TEST(Grammar, RoundTripOnRandomClaims) {
  std::mt19937_64 rng(77);
  const std::vector<std::string> keys{"Ar-fcc", "Kr-fcc", "Xe-fcc", "Cu_2", "mat-9"};
  std::uniform_int_distribution<int> pick(0, 4), prop(0, 2), cmp(0, 2), form(0, 1);
  std::uniform_real_distribution<double> num(-50.0, 50.0), tol(0.0, 2.0);
  for (int k = 0; k < 2000; ++k) {
    Claim c;
    c.property = static_cast<Property>(prop(rng));
    c.subject = keys[pick(rng)];
    c.comparator = static_cast<Comparator>(cmp(rng));
    if (form(rng)) {
      std::string other = keys[pick(rng)];
      while (other == c.subject) other = keys[pick(rng)];
      c.reference = other;
    } else {
      c.reference = Quantity{num(rng), unit_of(c.property)};
    }
    if (c.comparator == Comparator::kWithin) c.tolerance = tol(rng);
    ASSERT_FALSE(claim_violation(c).has_value());
    const std::string text = render_claim(c);
    EXPECT_EQ(parse_claim(text), c) << text;
  }
}

TEST(ResolveMaterials, Examples) {
  auto c = canon("The bulk modulus of Ar-fcc is less than 3 GPa");
  const auto one = resolve_materials(c, MaterialRegistry::builtin());
  ASSERT_EQ(one.size(), 1u);
  const auto& rec = std::get<MaterialRecord>(one[0]);
  EXPECT_EQ(rec.key, "Ar-fcc");
  EXPECT_EQ(rec.provenance, "builtin:v1");

  c = canon("The bulk modulus of unobtainium-x is less than 3 GPa");
  const auto missing = resolve_materials(c, MaterialRegistry::builtin());
  ASSERT_EQ(missing.size(), 1u);
  const auto& f = std::get<UnitFailure>(missing[0]);
  EXPECT_EQ(f.stage, FailureStage::kMaterialResolution);
  EXPECT_FALSE(f.recoverable);
  EXPECT_FALSE(f.message.empty());

  c = canon("The bulk modulus of Ar-fcc is less than that of unobtainium-x");
  const auto mixed = resolve_materials(c, MaterialRegistry::builtin());
  ASSERT_EQ(mixed.size(), 2u);
  EXPECT_EQ(std::get<MaterialRecord>(mixed[0]), rec);
  EXPECT_TRUE(std::holds_alternative<UnitFailure>(mixed[1]));
}

TEST(ResolveSpec, DefaultsOverridesAndRange) {
  const auto c = canon("The bulk modulus of Ar-fcc is less than 3 GPa");
  const auto d = std::get<ResolvedSpec>(resolve_spec(c));
  EXPECT_EQ(d.calculator, CalculatorConfig{});
  EXPECT_EQ(d.calculator.model, "lj-toy");
  EXPECT_EQ(d.calculator.precision, "float64");
  EXPECT_EQ(d.calculator.device, "cpu");
  EXPECT_EQ(d.calculator.seed, 42);
  EXPECT_EQ(d.task.optimizer, "fire");
  EXPECT_DOUBLE_EQ(d.task.fmax, 0.05);
  EXPECT_EQ(d.task.max_steps, 500);
  EXPECT_TRUE(d.task.cell_relax);

  SpecOverrides o;
  o.fmax = 0.01;
  const auto r = std::get<ResolvedSpec>(resolve_spec(c, o));
  EXPECT_DOUBLE_EQ(r.task.fmax, 0.01);
  EXPECT_EQ(r.task.max_steps, 500);

  for (auto mutate : std::vector<std::function<void(SpecOverrides&)>>{
           [](SpecOverrides& x) { x.fmax = -1; }, [](SpecOverrides& x) { x.fmax = 0; },
           [](SpecOverrides& x) { x.max_steps = 0; }, [](SpecOverrides& x) { x.optimizer = "bfgs"; },
           [](SpecOverrides& x) { x.model = "unknown"; }, [](SpecOverrides& x) { x.precision = "float16"; }}) {
    SpecOverrides bad;
    mutate(bad);
    const auto res = resolve_spec(c, bad);
    ASSERT_TRUE(std::holds_alternative<UnitFailure>(res));
    EXPECT_EQ(std::get<UnitFailure>(res).stage, FailureStage::kSpecResolution);
  }
}

TEST(Overrides, FlatAndNested) {
  const auto a = overrides_from_json({{"fmax", 0.02}, {"seed", 7}});
  const auto b = overrides_from_json({{"task", {{"fmax", 0.02}}}, {"calculator", {{"seed", 7}}}});
  EXPECT_EQ(a.fmax, b.fmax);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_THROW(overrides_from_json({{"fmax", "small"}}), Error);
}

TEST(AssembleUnits, CartesianProduct) {
  const auto spec = assemble("The bulk modulus of Kr-fcc is greater than that of Ar-fcc", 3);
  ASSERT_EQ(spec.units.size(), 6u);
  EXPECT_TRUE(spec.failures.empty());
  const std::vector<std::string> ids{"m0-t0", "m0-t1", "m0-t2", "m1-t0", "m1-t1", "m1-t2"};
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(spec.units[k].unit_id, ids[k]);
    const int i = static_cast<int>(k / 3), j = static_cast<int>(k % 3);
    EXPECT_EQ(spec.units[k].perturbation_seed, 42 + 1000 * i + j);
    EXPECT_EQ(spec.units[k].trial_index, j);
    EXPECT_EQ(spec.units[k].material.key, i == 0 ? "Kr-fcc" : "Ar-fcc");
    EXPECT_EQ(spec.units[k].category, Category::kMechanical);
  }
  EXPECT_TRUE(validate_spec(to_json(spec)).empty());
}

TEST(AssembleUnits, FailedMaterialIsIsolated) {
  const auto spec = assemble("The bulk modulus of Ar-fcc is greater than that of unobtainium-x", 2);
  ASSERT_EQ(spec.units.size(), 2u);
  ASSERT_EQ(spec.failures.size(), 2u);
  for (const auto& f : spec.failures) {
    EXPECT_EQ(f.stage, FailureStage::kMaterialResolution);
    EXPECT_EQ(f.material, "unobtainium-x");
  }
  EXPECT_TRUE(validate_spec(to_json(spec)).empty());

  // Units of the surviving material match a spec without the failing one.
  const auto alone = assemble("The bulk modulus of Ar-fcc is less than 9 GPa", 2);
  for (std::size_t k = 0; k < 2; ++k)
    EXPECT_EQ(canonical_dump(to_json(spec.units[k])), canonical_dump(to_json(alone.units[k])));
}

TEST(AssembleUnits, SpecFailureCoversTheGrid) {
  SpecOverrides o;
  o.fmax = -1;
  const auto spec = assemble("The bulk modulus of Kr-fcc is greater than that of Ar-fcc", 2, o);
  EXPECT_TRUE(spec.units.empty());
  ASSERT_EQ(spec.failures.size(), 4u);
  for (const auto& f : spec.failures) EXPECT_EQ(f.stage, FailureStage::kSpecResolution);
  EXPECT_TRUE(validate_spec(to_json(spec)).empty());
}

TEST(AssembleUnits, InvalidTrialCount) {
  try {
    assemble("The bulk modulus of Ar-fcc is less than 3 GPa", 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "InvalidTrialCount");
  }
}

TEST(AssembleUnits, DeterministicAndRoundTrips) {
  const std::string text = "The lattice constant of Xe-fcc is greater than that of Kr-fcc";
  const auto a = canonical_dump(to_json(assemble(text, 4)));
  const auto b = canonical_dump(to_json(assemble(text, 4)));
  EXPECT_EQ(a, b);
  EXPECT_EQ(canonical_dump(to_json(spec_from_json(Json::parse(a)))), a);
  const auto c = canon(text);
  EXPECT_EQ(canonical_from_json(to_json(c)), c);
}

TEST(ValidateSpec, Diagnostics) {
  const Json good = to_json(assemble("The bulk modulus of Kr-fcc is greater than that of Ar-fcc", 2));
  ASSERT_TRUE(validate_spec(good).empty());

  Json j = good;
  j["units"][0]["resolved"]["task"]["fmax"] = 0;
  EXPECT_TRUE(has_rule(validate_spec(j), "/units/0/resolved/task/fmax", "range"));

  j = good;
  j["units"][1]["unit_id"] = j["units"][0]["unit_id"];
  bool unique = false;
  for (const auto& d : validate_spec(j)) unique = unique || d.rule == "uniqueness";
  EXPECT_TRUE(unique);

  j = good;
  j.erase("schema_version");
  EXPECT_TRUE(has_rule(validate_spec(j), "/schema_version", "required"));

  j = good;
  j["units"][0]["unit_id"] = "unit-zero";
  EXPECT_TRUE(has_rule(validate_spec(j), "/units/0/unit_id", "format"));

  j = good;
  j["units"].erase(j["units"].begin());
  bool coverage = false;
  for (const auto& d : validate_spec(j)) coverage = coverage || d.rule == "coverage";
  EXPECT_TRUE(coverage);

  j = good;
  j["units"][0]["resolved"]["calculator"]["precision"] = "float16";
  EXPECT_TRUE(has_rule(validate_spec(j), "/units/0/resolved/calculator/precision", "enum"));

  EXPECT_FALSE(validate_spec(Json::array()).empty());
  EXPECT_TRUE(experiment_spec_schema().contains("$schema"));
}

TEST(Registry, BuiltinEntriesParseAndCustomFiles) {
  for (const char* key : {"Ar-fcc", "Kr-fcc", "Xe-fcc"}) {
    const auto rec = MaterialRegistry::builtin().find(key);
    ASSERT_TRUE(rec.has_value()) << key;
    EXPECT_FALSE(rec->provenance.empty());
  }
  const auto reg = MaterialRegistry::from_json(MaterialRegistry::builtin().to_json());
  EXPECT_EQ(reg.size(), MaterialRegistry::builtin().size());
  Json bad = MaterialRegistry::builtin().to_json();
  bad["Ar-fcc"]["cif"] = "data_x\n_cell_length_a 5\n";
  EXPECT_THROW(MaterialRegistry::from_json(bad), Error);
  bad = MaterialRegistry::builtin().to_json();
  bad["Ar-fcc"]["provenance"] = "";
  EXPECT_THROW(MaterialRegistry::from_json(bad), Error);
}

}  // namespace
