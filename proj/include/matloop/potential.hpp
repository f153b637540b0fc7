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

#ifndef MATLOOP_POTENTIAL_HPP_
#define MATLOOP_POTENTIAL_HPP_

#include <map>
#include <string>
#include <vector>

#include "matloop/json_util.hpp"
#include "matloop/structure.hpp"

namespace matloop::calc {

using structure::Structure;
using structure::Vec3;

// 1 eV/Å³ in GPa.
inline constexpr double kEvPerA3ToGPa = 160.21766208;

enum class Precision { kFloat32, kFloat64 };

std::string to_string(Precision p);
Precision precision_from_string(const std::string& s);

struct SpeciesParams {
  double epsilon;  // eV
  double sigma;    // Å
};

// Shifted Lennard-Jones with Lorentz–Berthelot mixing.
struct PotentialParams {
  std::map<std::string, SpeciesParams> species;
  // r_c = cutoff_factor · max mixed sigma over the species present.
  double cutoff_factor = 3.0;
  // Subtract the pair energy at r_c so every pair vanishes at the cutoff.
  bool shifted = true;
};

// Validates epsilon > 0, sigma > 0, cutoff_factor >= 2.
void check_params(const PotentialParams& p);

// The bundled "lj-toy" parameter set (Ar, Kr, Xe; cutoff_factor 3).
const PotentialParams& lj_toy();
// Looks up a calculator model name; throws Error("UnknownModel").
const PotentialParams& params_for_model(const std::string& model);
bool is_known_model(const std::string& model);

// Potential-parameter file: JSON map species -> {epsilon, sigma}.
PotentialParams params_from_json(const Json& j, double cutoff_factor = 3.0);
Json to_json(const PotentialParams& p);

struct MixedPair {
  double epsilon;
  double sigma;
};
MixedPair mix(const SpeciesParams& a, const SpeciesParams& b);

double cutoff_radius(const Structure& s, const PotentialParams& p);

// Unshifted 12-6 pair energy and its radial derivative.
double lj_pair_energy(double r, const MixedPair& m);
double lj_pair_derivative(double r, const MixedPair& m);

struct EnergyForces {
  double energy = 0.0;        // eV
  std::vector<Vec3> forces;   // eV/Å
};

// errors: UnknownSpecies
EnergyForces energy_forces(const Structure& s, const PotentialParams& p,
                           Precision precision = Precision::kFloat64);
double energy(const Structure& s, const PotentialParams& p,
              Precision precision = Precision::kFloat64);

double max_force_norm(const std::vector<Vec3>& forces);

}  // namespace matloop::calc

#endif  // MATLOOP_POTENTIAL_HPP_
