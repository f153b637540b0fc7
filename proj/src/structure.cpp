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

#include "matloop/structure.hpp"

#include <algorithm>

#include "matloop/error.hpp"

namespace matloop::structure {

double determinant(const Mat3& m) { return dot(m[0], cross(m[1], m[2])); }

Mat3 inverse(const Mat3& m) {
  const double det = determinant(m);
  if (det == 0.0) throw Error("InvalidStructure", "singular lattice");
  // Columns of the inverse are the reciprocal-space rows scaled by 1/det.
  const Vec3 r0 = cross(m[1], m[2]);
  const Vec3 r1 = cross(m[2], m[0]);
  const Vec3 r2 = cross(m[0], m[1]);
  Mat3 inv{};
  for (int i = 0; i < 3; ++i) {
    inv[i][0] = r0[i] / det;
    inv[i][1] = r1[i] / det;
    inv[i][2] = r2[i] / det;
  }
  return inv;
}

Vec3 row_times(const Vec3& v, const Mat3& m) {
  return {v[0] * m[0][0] + v[1] * m[1][0] + v[2] * m[2][0],
          v[0] * m[0][1] + v[1] * m[1][1] + v[2] * m[2][1],
          v[0] * m[0][2] + v[1] * m[1][2] + v[2] * m[2][2]};
}

double wrap_unit(double f) {
  double w = f - std::floor(f);
  // floor can round a tiny negative value up to exactly 1.0
  if (w >= 1.0) w = 0.0;
  return w;
}

double Structure::volume() const { return std::abs(determinant(lattice)); }

std::vector<Vec3> Structure::cartesian_coords() const {
  std::vector<Vec3> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(cartesian(i));
  return out;
}

void Structure::set_cartesian(const std::vector<Vec3>& cart) {
  const Mat3 inv = inverse(lattice);
  frac_coords.resize(cart.size());
  for (std::size_t i = 0; i < cart.size(); ++i) {
    Vec3 f = row_times(cart[i], inv);
    if (periodic) {
      for (double& c : f) c = wrap_unit(c);
    }
    frac_coords[i] = f;
  }
}

Structure Structure::scaled(double s) const {
  Structure out = *this;
  for (auto& row : out.lattice) row = s * row;
  return out;
}

void check_invariants(const Structure& s) {
  if (s.species.empty()) throw Error("InvalidStructure", "structure has no atoms");
  if (s.species.size() != s.frac_coords.size())
    throw Error("InvalidStructure", "species and coordinate counts differ");
  if (s.periodic) {
    if (!(determinant(s.lattice) > 0.0))
      throw Error("InvalidStructure", "lattice determinant must be positive");
    for (const auto& f : s.frac_coords)
      for (double c : f)
        if (!(c >= 0.0 && c < 1.0))
          throw Error("InvalidStructure", "fractional coordinate outside [0,1)");
  }
}

Structure make_cluster(const std::vector<std::string>& species,
                       const std::vector<Vec3>& cart, double box) {
  Structure s;
  s.lattice = {{{box, 0, 0}, {0, box, 0}, {0, 0, box}}};
  s.species = species;
  s.periodic = false;
  s.set_cartesian(cart);
  return s;
}

Structure make_supercell(const Structure& s, std::array<int, 3> reps) {
  for (int r : reps)
    if (r < 1) throw Error("InvalidReps", "supercell repetitions must be >= 1");
  if (!s.periodic) throw Error("NotPeriodic", "supercell of a non-periodic structure");
  Structure out;
  out.periodic = true;
  for (int k = 0; k < 3; ++k) out.lattice[k] = static_cast<double>(reps[k]) * s.lattice[k];
  for (int a = 0; a < reps[0]; ++a)
    for (int b = 0; b < reps[1]; ++b)
      for (int c = 0; c < reps[2]; ++c)
        for (std::size_t i = 0; i < s.size(); ++i) {
          const Vec3& f = s.frac_coords[i];
          out.species.push_back(s.species[i]);
          out.frac_coords.push_back({(f[0] + a) / reps[0], (f[1] + b) / reps[1], (f[2] + c) / reps[2]});
        }
  return out;
}

Vec3 face_heights(const Mat3& l) {
  const double vol = std::abs(determinant(l));
  return {vol / norm(cross(l[1], l[2])), vol / norm(cross(l[2], l[0])),
          vol / norm(cross(l[0], l[1]))};
}

bool approx_equal(const Structure& a, const Structure& b, double tol) {
  if (a.periodic != b.periodic || a.species != b.species || a.size() != b.size()) return false;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      if (std::abs(a.lattice[i][k] - b.lattice[i][k]) > tol) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      double d = a.frac_coords[i][k] - b.frac_coords[i][k];
      if (a.periodic) d -= std::round(d);
      if (std::abs(d) > tol) return false;
    }
  }
  return true;
}

Json to_json(const Structure& s) {
  Json lattice = Json::array();
  for (const auto& row : s.lattice) lattice.push_back({row[0], row[1], row[2]});
  Json frac = Json::array();
  for (const auto& f : s.frac_coords) frac.push_back({f[0], f[1], f[2]});
  return Json{{"lattice", lattice}, {"species", s.species}, {"frac_coords", frac},
              {"periodic", s.periodic}};
}

Structure structure_from_json(const Json& j) {
  Structure s;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) s.lattice[i][k] = j.at("lattice").at(i).at(k).get<double>();
  s.species = j.at("species").get<std::vector<std::string>>();
  for (const auto& f : j.at("frac_coords"))
    s.frac_coords.push_back({f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>()});
  s.periodic = j.at("periodic").get<bool>();
  return s;
}

}  // namespace matloop::structure
