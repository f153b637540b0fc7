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

#ifndef MATLOOP_STRUCTURE_HPP_
#define MATLOOP_STRUCTURE_HPP_

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "matloop/json_util.hpp"

namespace matloop::structure {

using Vec3 = std::array<double, 3>;
// Row-major; rows are the a, b, c lattice vectors in Cartesian Å.
using Mat3 = std::array<Vec3, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double determinant(const Mat3& m);
Mat3 inverse(const Mat3& m);
// Row vector times matrix: frac · lattice.
Vec3 row_times(const Vec3& v, const Mat3& m);

// Periodic crystal, or a finite cluster when `periodic` is false. For a
// cluster the lattice is only a reference frame: fractional coordinates are
// not wrapped and no images are generated.
struct Structure {
  Mat3 lattice{};
  std::vector<std::string> species;
  std::vector<Vec3> frac_coords;
  bool periodic = true;

  std::size_t size() const { return species.size(); }
  double volume() const;
  Vec3 cartesian(std::size_t i) const { return row_times(frac_coords[i], lattice); }
  std::vector<Vec3> cartesian_coords() const;

  // Replaces positions from Cartesian coordinates, wrapping if periodic.
  void set_cartesian(const std::vector<Vec3>& cart);
  // Uniformly scales the lattice by `s` with fractional coordinates fixed.
  Structure scaled(double s) const;

  bool operator==(const Structure&) const = default;
};

// Throws Error("InvalidStructure") when the invariants do not hold.
void check_invariants(const Structure& s);

double wrap_unit(double f);

// Builds a cluster in a cubic reference box of edge `box` Å.
Structure make_cluster(const std::vector<std::string>& species,
                       const std::vector<Vec3>& cart, double box = 20.0);

// errors: InvalidReps, NotPeriodic
Structure make_supercell(const Structure& s, std::array<int, 3> reps);

// Perpendicular distances between opposite cell faces.
Vec3 face_heights(const Mat3& lattice);

// True when every coordinate and lattice entry differ by at most `tol`.
bool approx_equal(const Structure& a, const Structure& b, double tol);

Json to_json(const Structure& s);
Structure structure_from_json(const Json& j);

}  // namespace matloop::structure

#endif  // MATLOOP_STRUCTURE_HPP_
