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

#ifndef MATLOOP_PROPERTIES_HPP_
#define MATLOOP_PROPERTIES_HPP_

#include <map>
#include <string>

#include "matloop/eos.hpp"
#include "matloop/json_util.hpp"
#include "matloop/relax.hpp"

namespace matloop::calc {

enum class Category { kEnergetic, kMechanical, kStructural };

std::string to_string(Category c);
Category category_from_string(const std::string& s);

struct PropertyValue {
  double value;
  std::string unit;
  bool operator==(const PropertyValue&) const = default;
};

using PropertyMap = std::map<std::string, PropertyValue>;

Json to_json(const PropertyMap& m);
PropertyMap property_map_from_json(const Json& j);

// Number of volume samples and the half-width of the sampled window.
inline constexpr int kEosPoints = 11;
inline constexpr double kEosVolumeSpan = 0.04;

struct PropertyOptions {
  // Atoms in the conventional cell the lattice constant refers to; 0 means
  // the relaxed structure already is one conventional cell.
  int atoms_per_conventional_cell = 0;
  Precision precision = Precision::kFloat64;
};

// E(V) samples at kEosPoints volumes spanning ±kEosVolumeSpan around the
// structure's volume, fractional coordinates held fixed.
void sample_energy_volume(const Structure& s, const PotentialParams& p, Precision precision,
                          std::vector<double>& volumes, std::vector<double>& energies);

// energetic  -> cohesive_energy_per_atom [eV/atom]
// structural -> lattice_constant [Å]
// mechanical -> bulk_modulus [GPa]
// errors: NotConverged, EOSFitFailure
PropertyMap compute_properties(const RelaxationOutcome& outcome, const PotentialParams& p,
                               Category category, const PropertyOptions& options = {});

}  // namespace matloop::calc

#endif  // MATLOOP_PROPERTIES_HPP_
