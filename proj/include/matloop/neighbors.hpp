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

#ifndef MATLOOP_NEIGHBORS_HPP_
#define MATLOOP_NEIGHBORS_HPP_

#include <array>
#include <cstddef>
#include <vector>

#include "matloop/structure.hpp"

namespace matloop::structure {

struct Pair {
  std::size_t i;
  std::size_t j;
  double distance;
  // Lattice translation applied to atom j.
  std::array<int, 3> image;
  // Cartesian separation r_j + image·L − r_i.
  Vec3 delta;
};

struct PairList {
  std::vector<Pair> pairs;
  double cutoff = 0.0;
};

// Every unordered (i, j, image) combination with separation <= cutoff,
// counted once. Images are enumerated explicitly with per-axis bound
// ceil(cutoff / face height) + 1; clusters only see the zero image.
// errors: NonPositiveCutoff
PairList neighbor_pairs(const Structure& s, double cutoff);

// Neighbour count of every atom (self-images contribute twice).
std::vector<int> coordination(const PairList& list, std::size_t n_atoms);

}  // namespace matloop::structure

#endif  // MATLOOP_NEIGHBORS_HPP_
