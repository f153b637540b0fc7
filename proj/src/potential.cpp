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

#include "matloop/potential.hpp"

#include <algorithm>
#include <cmath>

#include "matloop/error.hpp"
#include "matloop/neighbors.hpp"

namespace matloop::calc {

std::string to_string(Precision p) { return p == Precision::kFloat32 ? "float32" : "float64"; }

Precision precision_from_string(const std::string& s) {
  if (s == "float32") return Precision::kFloat32;
  if (s == "float64") return Precision::kFloat64;
  throw Error("UnknownPrecision", "unknown precision '" + s + "'");
}

void check_params(const PotentialParams& p) {
  for (const auto& [name, sp] : p.species)
    if (!(sp.epsilon > 0.0) || !(sp.sigma > 0.0))
      throw Error("InvalidPotential", "epsilon and sigma must be positive for " + name);
  if (!(p.cutoff_factor >= 2.0)) throw Error("InvalidPotential", "cutoff_factor must be >= 2");
}

const PotentialParams& lj_toy() {
  static const PotentialParams params{
      {{"Ar", {0.0104, 3.40}}, {"Kr", {0.0140, 3.65}}, {"Xe", {0.0200, 3.98}}}, 3.0, true};
  return params;
}

bool is_known_model(const std::string& model) { return model == "lj-toy"; }

const PotentialParams& params_for_model(const std::string& model) {
  if (!is_known_model(model)) throw Error("UnknownModel", "unknown calculator model '" + model + "'");
  return lj_toy();
}

PotentialParams params_from_json(const Json& j, double cutoff_factor) {
  PotentialParams p;
  p.cutoff_factor = cutoff_factor;
  for (auto it = j.begin(); it != j.end(); ++it)
    p.species[it.key()] = {it->at("epsilon").get<double>(), it->at("sigma").get<double>()};
  check_params(p);
  return p;
}

Json to_json(const PotentialParams& p) {
  Json j = Json::object();
  for (const auto& [name, sp] : p.species) j[name] = {{"epsilon", sp.epsilon}, {"sigma", sp.sigma}};
  return j;
}

MixedPair mix(const SpeciesParams& a, const SpeciesParams& b) {
  return {std::sqrt(a.epsilon * b.epsilon), 0.5 * (a.sigma + b.sigma)};
}

double lj_pair_energy(double r, const MixedPair& m) {
  const double sr6 = std::pow(m.sigma / r, 6);
  return 4.0 * m.epsilon * (sr6 * sr6 - sr6);
}

double lj_pair_derivative(double r, const MixedPair& m) {
  const double sr6 = std::pow(m.sigma / r, 6);
  return 4.0 * m.epsilon * (-12.0 * sr6 * sr6 + 6.0 * sr6) / r;
}

namespace {

const SpeciesParams& lookup(const PotentialParams& p, const std::string& name) {
  auto it = p.species.find(name);
  if (it == p.species.end()) throw Error("UnknownSpecies", "no potential parameters for " + name);
  return it->second;
}

}  // namespace

double cutoff_radius(const Structure& s, const PotentialParams& p) {
  double max_sigma = 0.0;
  for (const auto& a : s.species)
    for (const auto& b : s.species) max_sigma = std::max(max_sigma, mix(lookup(p, a), lookup(p, b)).sigma);
  return p.cutoff_factor * max_sigma;
}

EnergyForces energy_forces(const Structure& s, const PotentialParams& p, Precision precision) {
  const double rc = cutoff_radius(s, p);
  const auto list = structure::neighbor_pairs(s, rc);

  // Mixed parameters per species pair, resolved once.
  std::vector<std::string> kinds = s.species;
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  std::vector<int> kind_of(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    kind_of[i] = static_cast<int>(std::lower_bound(kinds.begin(), kinds.end(), s.species[i]) - kinds.begin());
  const std::size_t nk = kinds.size();
  std::vector<MixedPair> mixed(nk * nk);
  std::vector<double> shift(nk * nk, 0.0);
  for (std::size_t a = 0; a < nk; ++a)
    for (std::size_t b = 0; b < nk; ++b) {
      mixed[a * nk + b] = mix(lookup(p, kinds[a]), lookup(p, kinds[b]));
      if (p.shifted && std::isfinite(rc)) shift[a * nk + b] = lj_pair_energy(rc, mixed[a * nk + b]);
    }

  EnergyForces out;
  out.forces.assign(s.size(), Vec3{0.0, 0.0, 0.0});
  for (const auto& pr : list.pairs) {
    const std::size_t k = kind_of[pr.i] * nk + kind_of[pr.j];
    out.energy += lj_pair_energy(pr.distance, mixed[k]) - shift[k];
    // F_i = φ'(r) · d/r and F_j = −F_i, with d = r_j − r_i.
    const double scale = lj_pair_derivative(pr.distance, mixed[k]) / pr.distance;
    for (int c = 0; c < 3; ++c) {
      out.forces[pr.i][c] += scale * pr.delta[c];
      out.forces[pr.j][c] -= scale * pr.delta[c];
    }
  }
  if (precision == Precision::kFloat32) {
    out.energy = static_cast<float>(out.energy);
    for (auto& f : out.forces)
      for (double& c : f) c = static_cast<float>(c);
  }
  return out;
}

double energy(const Structure& s, const PotentialParams& p, Precision precision) {
  return energy_forces(s, p, precision).energy;
}

double max_force_norm(const std::vector<Vec3>& forces) {
  double m = 0.0;
  for (const auto& f : forces) m = std::max(m, structure::norm(f));
  return m;
}

}  // namespace matloop::calc
