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

#include "matloop/schema.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "matloop/spec_types.hpp"

namespace matloop {
namespace {

class Checker {
 public:
  std::vector<Diagnostic> diags;

  void add(const std::string& path, const std::string& rule, const std::string& msg) {
    diags.push_back({path, rule, msg});
  }

  // Returns the member if present with the right type, else records a diagnostic.
  const Json* member(const Json& obj, const std::string& path, const char* key, Json::value_t type,
                     const char* type_name) {
    const std::string p = path + "/" + key;
    if (!obj.contains(key)) {
      add(p, "required", std::string("missing required field '") + key + "'");
      return nullptr;
    }
    const Json& v = obj.at(key);
    const bool ok = type == Json::value_t::number_float ? v.is_number()
                    : type == Json::value_t::number_integer ? v.is_number_integer()
                                                            : v.type() == type;
    if (!ok) {
      add(p, "type", std::string("'") + key + "' must be " + type_name);
      return nullptr;
    }
    return &v;
  }

  const Json* string_member(const Json& obj, const std::string& path, const char* key, bool nonempty = true) {
    const Json* v = member(obj, path, key, Json::value_t::string, "a string");
    if (v && nonempty && v->get_ref<const std::string&>().empty()) {
      add(path + "/" + key, "range", std::string("'") + key + "' must be non-empty");
      return nullptr;
    }
    return v;
  }

  void enum_member(const Json& obj, const std::string& path, const char* key,
                   std::initializer_list<std::string_view> allowed) {
    const Json* v = member(obj, path, key, Json::value_t::string, "a string");
    if (!v) return;
    const auto& s = v->get_ref<const std::string&>();
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      add(path + "/" + key, "enum", std::string("'") + key + "' must be one of {" + list + "}, got '" + s + "'");
    }
  }

  void no_unknown_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
        add(path + "/" + it.key(), "unknown_key", "unexpected field '" + it.key() + "'");
  }

  bool object_at(const Json& obj, const std::string& path, const char* key) {
    return member(obj, path, key, Json::value_t::object, "an object") != nullptr;
  }

  void unit_id(const Json& obj, const std::string& path, bool allow_empty) {
    const Json* v = member(obj, path, "unit_id", Json::value_t::string, "a string");
    if (!v) return;
    const auto& s = v->get_ref<const std::string&>();
    if (s.empty() && allow_empty) return;
    if (!parse_unit_id(s)) add(path + "/unit_id", "format", "unit_id '" + s + "' does not match m{i}-t{j}");
  }

  void check_unit(const Json& u, const std::string& path) {
    if (!u.is_object()) {
      add(path, "type", "unit must be an object");
      return;
    }
    no_unknown_keys(u, path, {"unit_id", "material", "trial_index", "resolved", "perturbation_seed", "category"});
    unit_id(u, path, false);
    if (object_at(u, path, "material")) {
      const Json& m = u.at("material");
      const std::string mp = path + "/material";
      no_unknown_keys(m, mp, {"key", "formula", "cif_text", "provenance"});
      string_member(m, mp, "key");
      string_member(m, mp, "formula", false);
      string_member(m, mp, "cif_text");
      string_member(m, mp, "provenance");
    }
    if (const Json* t = member(u, path, "trial_index", Json::value_t::number_integer, "an integer")) {
      if (t->get<long long>() < 0) add(path + "/trial_index", "range", "trial_index must be >= 0");
      if (u.contains("unit_id") && u.at("unit_id").is_string())
        if (auto ij = parse_unit_id(u.at("unit_id").get<std::string>()); ij && ij->second != t->get<long long>())
          add(path + "/trial_index", "consistency", "trial_index disagrees with unit_id");
    }
    member(u, path, "perturbation_seed", Json::value_t::number_integer, "an integer");
    enum_member(u, path, "category", {"energetic", "mechanical", "structural"});
    if (object_at(u, path, "resolved")) {
      const Json& r = u.at("resolved");
      const std::string rp = path + "/resolved";
      no_unknown_keys(r, rp, {"calculator", "task"});
      if (object_at(r, rp, "calculator")) {
        const Json& c = r.at("calculator");
        const std::string cp = rp + "/calculator";
        no_unknown_keys(c, cp, {"model", "precision", "device", "seed"});
        string_member(c, cp, "model");
        enum_member(c, cp, "precision", {"float32", "float64"});
        string_member(c, cp, "device");
        member(c, cp, "seed", Json::value_t::number_integer, "an integer");
      }
      if (object_at(r, rp, "task")) {
        const Json& t = r.at("task");
        const std::string tp = rp + "/task";
        no_unknown_keys(t, tp, {"optimizer", "fmax", "max_steps", "cell_relax"});
        enum_member(t, tp, "optimizer", {"fire"});
        if (const Json* f = member(t, tp, "fmax", Json::value_t::number_float, "a number"))
          if (!(f->get<double>() > 0.0)) add(tp + "/fmax", "range", "fmax must be > 0 eV/Å");
        if (const Json* m = member(t, tp, "max_steps", Json::value_t::number_integer, "an integer"))
          if (m->get<long long>() < 1) add(tp + "/max_steps", "range", "max_steps must be >= 1");
        member(t, tp, "cell_relax", Json::value_t::boolean, "a boolean");
      }
    }
  }

  void check_failure(const Json& f, const std::string& path) {
    if (!f.is_object()) {
      add(path, "type", "failure must be an object");
      return;
    }
    no_unknown_keys(f, path, {"unit_id", "material", "stage", "message", "recoverable"});
    unit_id(f, path, true);
    string_member(f, path, "material", false);
    enum_member(f, path, "stage",
                {"material_resolution", "spec_resolution", "schema_validation", "parse", "simulation"});
    string_member(f, path, "message");
    member(f, path, "recoverable", Json::value_t::boolean, "a boolean");
  }
};

}  // namespace

Json to_json(const Diagnostic& d) { return {{"path", d.path}, {"rule", d.rule}, {"message", d.message}}; }

std::vector<Diagnostic> validate_spec(const Json& doc) {
  Checker c;
  if (!doc.is_object()) {
    c.add("", "type", "document must be a JSON object");
    return c.diags;
  }
  c.no_unknown_keys(doc, "", {"schema_version", "spec_id", "canonical_ref", "units", "failures"});
  if (const Json* v = c.string_member(doc, "", "schema_version"))
    if (*v != kSchemaVersion)
      c.add("/schema_version", "enum", "unsupported schema_version '" + v->get<std::string>() + "'");
  c.string_member(doc, "", "spec_id");
  c.string_member(doc, "", "canonical_ref");
  const Json* units = c.member(doc, "", "units", Json::value_t::array, "an array");
  const Json* failures = c.member(doc, "", "failures", Json::value_t::array, "an array");
  if (units)
    for (std::size_t k = 0; k < units->size(); ++k) c.check_unit(units->at(k), "/units/" + std::to_string(k));
  if (failures)
    for (std::size_t k = 0; k < failures->size(); ++k)
      c.check_failure(failures->at(k), "/failures/" + std::to_string(k));
  if (!units || !failures) return c.diags;

  // Cross-entry rules over well-formed ids only.
  struct Entry {
    std::string path;
    std::pair<int, int> ij;
    std::string material;
  };
  std::vector<Entry> entries;
  auto collect = [&](const Json& arr, const char* prefix, bool is_unit) {
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const Json& e = arr.at(k);
      if (!e.is_object() || !e.contains("unit_id") || !e.at("unit_id").is_string()) continue;
      auto ij = parse_unit_id(e.at("unit_id").get<std::string>());
      if (!ij) continue;
      std::string material;
      if (is_unit && e.contains("material") && e.at("material").is_object() && e.at("material").contains("key") &&
          e.at("material").at("key").is_string())
        material = e.at("material").at("key").get<std::string>();
      else if (!is_unit && e.contains("material") && e.at("material").is_string())
        material = e.at("material").get<std::string>();
      entries.push_back({std::string(prefix) + std::to_string(k), *ij, material});
    }
  };
  collect(*units, "/units/", true);
  collect(*failures, "/failures/", false);

  bool unique = true;
  std::map<std::pair<int, int>, std::string> seen;
  for (const auto& e : entries) {
    auto [it, inserted] = seen.emplace(e.ij, e.path);
    if (!inserted) {
      unique = false;
      c.add(e.path + "/unit_id", "uniqueness",
            "unit_id " + make_unit_id(e.ij.first, e.ij.second) + " already used at " + it->second);
    }
  }
  if (!unique) return c.diags;

  if (entries.empty()) {
    c.add("/units", "coverage", "spec covers no material-trial pair");
    return c.diags;
  }
  int n_materials = 0, n_trials = 0;
  std::map<int, std::pair<std::string, std::string>> material_of;  // index -> (key, path)
  for (const auto& e : entries) {
    n_materials = std::max(n_materials, e.ij.first + 1);
    n_trials = std::max(n_trials, e.ij.second + 1);
    if (e.material.empty()) continue;
    auto [it, inserted] = material_of.emplace(e.ij.first, std::make_pair(e.material, e.path));
    if (!inserted && it->second.first != e.material)
      c.add(e.path, "consistency",
            "material index " + std::to_string(e.ij.first) + " refers to both '" + it->second.first + "' and '" +
                e.material + "'");
  }
  for (int i = 0; i < n_materials; ++i)
    for (int j = 0; j < n_trials; ++j)
      if (!seen.count({i, j}))
        c.add("/units", "coverage", "no unit or failure covers " + make_unit_id(i, j));
  return c.diags;
}

const Json& experiment_spec_schema() {
  static const Json schema = Json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "ExperimentSpec",
  "type": "object",
  "additionalProperties": false,
  "required": ["schema_version", "spec_id", "canonical_ref", "units", "failures"],
  "properties": {
    "schema_version": {"const": "1.0"},
    "spec_id": {"type": "string", "minLength": 1},
    "canonical_ref": {"type": "string", "minLength": 1},
    "units": {"type": "array", "items": {"$ref": "#/$defs/unit"}},
    "failures": {"type": "array", "items": {"$ref": "#/$defs/failure"}}
  },
  "$defs": {
    "unit_id": {"type": "string", "pattern": "^m(0|[1-9][0-9]*)-t(0|[1-9][0-9]*)$"},
    "unit": {
      "type": "object",
      "additionalProperties": false,
      "required": ["unit_id", "material", "trial_index", "resolved", "perturbation_seed", "category"],
      "properties": {
        "unit_id": {"$ref": "#/$defs/unit_id"},
        "material": {
          "type": "object",
          "additionalProperties": false,
          "required": ["key", "formula", "cif_text", "provenance"],
          "properties": {
            "key": {"type": "string", "minLength": 1},
            "formula": {"type": "string"},
            "cif_text": {"type": "string", "minLength": 1},
            "provenance": {"type": "string", "minLength": 1}
          }
        },
        "trial_index": {"type": "integer", "minimum": 0},
        "perturbation_seed": {"type": "integer"},
        "category": {"enum": ["energetic", "mechanical", "structural"]},
        "resolved": {
          "type": "object",
          "additionalProperties": false,
          "required": ["calculator", "task"],
          "properties": {
            "calculator": {
              "type": "object",
              "additionalProperties": false,
              "required": ["model", "precision", "device", "seed"],
              "properties": {
                "model": {"type": "string", "minLength": 1},
                "precision": {"enum": ["float32", "float64"]},
                "device": {"type": "string", "minLength": 1},
                "seed": {"type": "integer"}
              }
            },
            "task": {
              "type": "object",
              "additionalProperties": false,
              "required": ["optimizer", "fmax", "max_steps", "cell_relax"],
              "properties": {
                "optimizer": {"enum": ["fire"]},
                "fmax": {"type": "number", "exclusiveMinimum": 0},
                "max_steps": {"type": "integer", "minimum": 1},
                "cell_relax": {"type": "boolean"}
              }
            }
          }
        }
      }
    },
    "failure": {
      "type": "object",
      "additionalProperties": false,
      "required": ["unit_id", "material", "stage", "message", "recoverable"],
      "properties": {
        "unit_id": {"anyOf": [{"const": ""}, {"$ref": "#/$defs/unit_id"}]},
        "material": {"type": "string"},
        "stage": {"enum": ["material_resolution", "spec_resolution", "schema_validation", "parse", "simulation"]},
        "message": {"type": "string", "minLength": 1},
        "recoverable": {"type": "boolean"}
      }
    }
  }
})");
  return schema;
}

}  // namespace matloop
