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

#include "matloop/neighbors.hpp"

#include <cmath>

#include "matloop/error.hpp"

namespace matloop::structure {
namespace {

// Canonical half of the image lattice for i == j: first non-zero component > 0.
bool positive_half(const std::array<int, 3>& n) {
  for (int c : n)
    if (c != 0) return c > 0;
  return false;
}

}  // namespace

PairList neighbor_pairs(const Structure& s, double cutoff) {
  if (!(cutoff > 0.0)) throw Error("NonPositiveCutoff", "cutoff must be > 0");
  PairList out;
  out.cutoff = cutoff;
  const auto cart = s.cartesian_coords();
  const std::size_t n = s.size();

  std::array<int, 3> bound{0, 0, 0};
  if (s.periodic) {
    if (!std::isfinite(cutoff))
      throw Error("NonPositiveCutoff", "periodic structures need a finite cutoff");
    const Vec3 h = face_heights(s.lattice);
    for (int k = 0; k < 3; ++k) {
      bound[k] = static_cast<int>(std::ceil(cutoff / h[k])) + 1;
    }
  }

  const double cut2 = cutoff * cutoff;
  for (int a = -bound[0]; a <= bound[0]; ++a)
    for (int b = -bound[1]; b <= bound[1]; ++b)
      for (int c = -bound[2]; c <= bound[2]; ++c) {
        const std::array<int, 3> image{a, b, c};
        const Vec3 shift = row_times({double(a), double(b), double(c)}, s.lattice);
        const bool self_ok = positive_half(image);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = self_ok ? i : i + 1; j < n; ++j) {
            const Vec3 d = cart[j] + shift - cart[i];
            const double r2 = dot(d, d);
            if (r2 <= cut2) out.pairs.push_back({i, j, std::sqrt(r2), image, d});
          }
        }
      }
  return out;
}

std::vector<int> coordination(const PairList& list, std::size_t n_atoms) {
  std::vector<int> count(n_atoms, 0);
  for (const auto& p : list.pairs) {
    ++count[p.i];
    ++count[p.j];
  }
  return count;
}

}  // namespace matloop::structure
