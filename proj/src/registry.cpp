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

#include "matloop/registry.hpp"

#include <sstream>

#include "matloop/cif.hpp"
#include "matloop/error.hpp"

namespace matloop::frontend {

std::string fcc_cif(const std::string& element, double a) {
  std::ostringstream out;
  out << "data_" << element << "_fcc\n"
      << "_cell_length_a " << a << "\n_cell_length_b " << a << "\n_cell_length_c " << a << "\n"
      << "_cell_angle_alpha 90\n_cell_angle_beta 90\n_cell_angle_gamma 90\n"
      << "_symmetry_space_group_name_H-M 'P 1'\n"
      << "loop_\n_atom_site_label\n_atom_site_type_symbol\n"
      << "_atom_site_fract_x\n_atom_site_fract_y\n_atom_site_fract_z\n"
      << element << "1 " << element << " 0.0 0.0 0.0\n"
      << element << "2 " << element << " 0.5 0.5 0.0\n"
      << element << "3 " << element << " 0.5 0.0 0.5\n"
      << element << "4 " << element << " 0.0 0.5 0.5\n";
  return out.str();
}

MaterialRegistry MaterialRegistry::from_json(const Json& j) {
  if (!j.is_object()) throw Error("InvalidRegistry", "registry must be a JSON object");
  MaterialRegistry reg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& e = it.value();
    if (!e.is_object() || !e.contains("formula") || !e.contains("cif") || !e.contains("provenance"))
      throw Error("InvalidRegistry", "entry '" + it.key() + "' needs formula, cif and provenance");
    MaterialRecord rec{it.key(), e.at("formula").get<std::string>(), e.at("cif").get<std::string>(),
                       e.at("provenance").get<std::string>()};
    if (rec.provenance.empty()) throw Error("InvalidRegistry", "entry '" + it.key() + "' has empty provenance");
    try {
      structure::parse_cif(rec.cif_text);
    } catch (const Error& err) {
      throw Error("InvalidRegistry", "entry '" + it.key() + "': " + err.what());
    }
    reg.insert(std::move(rec));
  }
  return reg;
}

MaterialRegistry MaterialRegistry::from_file(const std::string& path) {
  try {
    return from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw Error("InvalidRegistry", path + ": " + e.what());
  }
}

const MaterialRegistry& MaterialRegistry::builtin() {
  static const MaterialRegistry reg = [] {
    MaterialRegistry r;
    r.insert({"Ar-fcc", "Ar", fcc_cif("Ar", 5.40), "builtin:v1"});
    r.insert({"Kr-fcc", "Kr", fcc_cif("Kr", 5.80), "builtin:v1"});
    r.insert({"Xe-fcc", "Xe", fcc_cif("Xe", 6.30), "builtin:v1"});
    return r;
  }();
  return reg;
}

std::optional<MaterialRecord> MaterialRegistry::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Json MaterialRegistry::to_json() const {
  Json j = Json::object();
  for (const auto& [key, rec] : entries_)
    j[key] = {{"formula", rec.formula}, {"cif", rec.cif_text}, {"provenance", rec.provenance}};
  return j;
}

void MaterialRegistry::insert(MaterialRecord record) {
  auto key = record.key;
  entries_[key] = std::move(record);
}

}  // namespace matloop::frontend
