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

#ifndef MATLOOP_REGISTRY_HPP_
#define MATLOOP_REGISTRY_HPP_

#include <map>
#include <optional>
#include <string>

#include "matloop/json_util.hpp"
#include "matloop/spec_types.hpp"

namespace matloop::frontend {

// Versioned map of material key -> CIF entry. File form:
//   {"Ar-fcc": {"formula": "Ar", "cif": "...", "provenance": "builtin:v1"}, ...}
class MaterialRegistry {
 public:
  MaterialRegistry() = default;

  // errors: InvalidRegistry (missing fields, empty provenance)
  static MaterialRegistry from_json(const Json& j);
  static MaterialRegistry from_file(const std::string& path);
  // Ar, Kr and Xe in the fcc conventional cell (P1, 4 sites).
  static const MaterialRegistry& builtin();

  std::optional<MaterialRecord> find(const std::string& key) const;
  std::size_t size() const { return entries_.size(); }
  Json to_json() const;

  void insert(MaterialRecord record);

 private:
  std::map<std::string, MaterialRecord> entries_;
};

// P1 CIF of the four-site fcc conventional cell.
std::string fcc_cif(const std::string& element, double a);

}  // namespace matloop::frontend

#endif  // MATLOOP_REGISTRY_HPP_
