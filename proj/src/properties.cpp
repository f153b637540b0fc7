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

#include "matloop/properties.hpp"

#include <cmath>

#include "matloop/error.hpp"

namespace matloop::calc {

std::string to_string(Category c) {
  switch (c) {
    case Category::kEnergetic: return "energetic";
    case Category::kMechanical: return "mechanical";
    case Category::kStructural: return "structural";
  }
  return "";
}

Category category_from_string(const std::string& s) {
  if (s == "energetic") return Category::kEnergetic;
  if (s == "mechanical") return Category::kMechanical;
  if (s == "structural") return Category::kStructural;
  throw Error("UnknownCategory", "unknown category '" + s + "'");
}

Json to_json(const PropertyMap& m) {
  Json j = Json::object();
  for (const auto& [name, pv] : m) j[name] = {{"value", pv.value}, {"unit", pv.unit}};
  return j;
}

PropertyMap property_map_from_json(const Json& j) {
  PropertyMap m;
  for (auto it = j.begin(); it != j.end(); ++it)
    m[it.key()] = {it->at("value").get<double>(), it->at("unit").get<std::string>()};
  return m;
}

void sample_energy_volume(const Structure& s, const PotentialParams& p, Precision precision,
                          std::vector<double>& volumes, std::vector<double>& energies) {
  volumes.clear();
  energies.clear();
  const double v_relaxed = s.volume();
  const int half = kEosPoints / 2;
  for (int k = -half; k <= half; ++k) {
    const double v = v_relaxed * (1.0 + kEosVolumeSpan * k / half);
    const Structure scaled = s.scaled(std::cbrt(v / v_relaxed));
    volumes.push_back(scaled.volume());
    energies.push_back(energy(scaled, p, precision));
  }
}

PropertyMap compute_properties(const RelaxationOutcome& outcome, const PotentialParams& p,
                               Category category, const PropertyOptions& options) {
  if (!outcome.converged) throw Error("NotConverged", "relaxation did not converge");
  const Structure& s = outcome.final_structure;
  const double n = static_cast<double>(s.size());
  PropertyMap props;
  switch (category) {
    case Category::kEnergetic:
      // Isolated atoms have zero energy under a pair potential.
      props["cohesive_energy_per_atom"] = {outcome.final_energy / n, "eV/atom"};
      break;
    case Category::kStructural: {
      const double per_cell = options.atoms_per_conventional_cell > 0 ? options.atoms_per_conventional_cell : n;
      props["lattice_constant"] = {std::cbrt(s.volume() * per_cell / n), "Å"};
      break;
    }
    case Category::kMechanical: {
      if (!s.periodic) throw Error("EOSFitFailure", "bulk modulus needs a periodic structure");
      std::vector<double> vols, es;
      sample_energy_volume(s, p, options.precision, vols, es);
      const auto fit = fit_birch_murnaghan(vols, es);
      props["bulk_modulus"] = {fit.params.b0 * kEvPerA3ToGPa, "GPa"};
      break;
    }
  }
  return props;
}

}  // namespace matloop::calc
