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

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerics.

#ifndef MATLOOP_TESTS_ORACLES_HPP_
#define MATLOOP_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using V3 = std::array<double, 3>;
using M3 = std::array<V3, 3>;

struct Species {
  double epsilon;
  double sigma;
};

inline const std::map<std::string, Species>& toy_table() {
  static const std::map<std::string, Species> t{
      {"Ar", {0.0104, 3.40}}, {"Kr", {0.0140, 3.65}}, {"Xe", {0.0200, 3.98}}};
  return t;
}

inline V3 to_cart(const V3& f, const M3& L) {
  V3 c{};
  for (int k = 0; k < 3; ++k) c[k] = f[0] * L[0][k] + f[1] * L[1][k] + f[2] * L[2][k];
  return c;
}

inline double cell_volume(const M3& L) {
  return std::abs(L[0][0] * (L[1][1] * L[2][2] - L[1][2] * L[2][1]) -
                  L[0][1] * (L[1][0] * L[2][2] - L[1][2] * L[2][0]) +
                  L[0][2] * (L[1][0] * L[2][1] - L[1][1] * L[2][0]));
}

// Smallest distance between opposite faces of the cell.
inline double min_face_height(const M3& L) {
  const double v = cell_volume(L);
  double h = 1e300;
  for (int k = 0; k < 3; ++k) {
    const V3& a = L[(k + 1) % 3];
    const V3& b = L[(k + 2) % 3];
    const V3 c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    h = std::min(h, v / std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
  }
  return h;
}

inline double toy_cutoff(const std::vector<std::string>& species) {
  double s = 0;
  for (const auto& a : species)
    for (const auto& b : species) s = std::max(s, 0.5 * (toy_table().at(a).sigma + toy_table().at(b).sigma));
  return 3.0 * s;
}

// Full double sum over atoms and images, halved; shifted at the cutoff.
inline double lj_energy(const M3& L, const std::vector<std::string>& species, const std::vector<V3>& frac,
                        bool periodic = true) {
  const double rc = toy_cutoff(species);
  const int n = periodic ? static_cast<int>(std::ceil(rc / min_face_height(L))) + 2 : 0;
  double e = 0;
  for (std::size_t i = 0; i < species.size(); ++i)
    for (std::size_t j = 0; j < species.size(); ++j) {
      const auto& a = toy_table().at(species[i]);
      const auto& b = toy_table().at(species[j]);
      const double eps = std::sqrt(a.epsilon * b.epsilon), sig = 0.5 * (a.sigma + b.sigma);
      const double shift = 4 * eps * (std::pow(sig / rc, 12) - std::pow(sig / rc, 6));
      for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y)
          for (int z = -n; z <= n; ++z) {
            if (i == j && x == 0 && y == 0 && z == 0) continue;
            const V3 f{frac[j][0] - frac[i][0] + x, frac[j][1] - frac[i][1] + y, frac[j][2] - frac[i][2] + z};
            const V3 d = to_cart(f, L);
            const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
            if (r >= rc) continue;
            e += 0.5 * (4 * eps * (std::pow(sig / r, 12) - std::pow(sig / r, 6)) - shift);
          }
    }
  return e;
}

// Number of unordered (atom, atom, image) pairs closer than `cutoff`.
inline std::size_t count_pairs(const M3& L, const std::vector<V3>& frac, double cutoff) {
  const int n = static_cast<int>(std::ceil(cutoff / min_face_height(L))) + 2;
  std::size_t ordered = 0;
  for (std::size_t i = 0; i < frac.size(); ++i)
    for (std::size_t j = 0; j < frac.size(); ++j)
      for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y)
          for (int z = -n; z <= n; ++z) {
            if (i == j && x == 0 && y == 0 && z == 0) continue;
            const V3 d = to_cart({frac[j][0] - frac[i][0] + x, frac[j][1] - frac[i][1] + y,
                                  frac[j][2] - frac[i][2] + z},
                                 L);
            if (std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) < cutoff) ++ordered;
          }
  return ordered / 2;
}

inline std::vector<V3> fcc_basis() { return {{0, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}}; }

inline M3 cubic(double a) { return {{{a, 0, 0}, {0, a, 0}, {0, 0, a}}}; }

// Per-atom fcc energy from the neighbour shells of one site: lattice points
// (i, j, k)/2 with i + j + k even, grouped by i^2 + j^2 + k^2.
inline double fcc_energy_per_atom(const std::string& el, double a) {
  static const std::map<int, int> shells = [] {
    std::map<int, int> m;
    const int n = 16;  // covers |p| <= 8 lattice constants
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j)
        for (int k = -n; k <= n; ++k)
          if ((i + j + k) % 2 == 0 && (i || j || k)) ++m[i * i + j * j + k * k];
    return m;
  }();
  const auto& sp = toy_table().at(el);
  const double rc = 3.0 * sp.sigma;
  if (rc > 8.0 * a) return std::nan("");
  auto phi = [&](double r) { return 4 * sp.epsilon * (std::pow(sp.sigma / r, 12) - std::pow(sp.sigma / r, 6)); };
  double e = 0;
  for (const auto& [q, count] : shells) {
    const double r = 0.5 * a * std::sqrt(static_cast<double>(q));
    if (r >= rc) break;
    e += 0.5 * count * (phi(r) - phi(rc));
  }
  return e;
}

struct ScanResult {
  double a_min;
  double step;
  double e_min;
};

// Uniform scan of the fcc lattice constant over [lo, hi] with `points` samples.
inline ScanResult fcc_scan(const std::string& el, double lo, double hi, int points) {
  ScanResult best{lo, (hi - lo) / (points - 1), 1e300};
  for (int k = 0; k < points; ++k) {
    const double a = lo + k * best.step;
    const double e = fcc_energy_per_atom(el, a);
    if (e < best.e_min) best = {a, best.step, e};
  }
  return best;
}

// B = V d2E/dV2 by central differences in volume on the fcc cell, eV/Å^3.
inline double fcc_bulk_modulus(const std::string& el, double a0, double rel_h = 1e-3) {
  auto e_of_v = [&](double v) { return 4.0 * fcc_energy_per_atom(el, std::cbrt(v)); };
  const double v0 = a0 * a0 * a0, h = v0 * rel_h;
  return v0 * (e_of_v(v0 + h) - 2 * e_of_v(v0) + e_of_v(v0 - h)) / (h * h);
}

// Majority over non-abstain votes (+1 yes, -1 no, 0 abstain): +1, -1 or 0
// for ties and all-abstain.
inline int majority(const std::vector<int>& votes) {
  int yes = 0, no = 0;
  for (int v : votes) {
    if (v > 0) ++yes;
    if (v < 0) ++no;
  }
  return yes > no ? 1 : (no > yes ? -1 : 0);
}

inline double mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_std(const std::vector<double>& x) {
  if (x.size() < 2) return 0;
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

}  // namespace oracle

#endif  // MATLOOP_TESTS_ORACLES_HPP_
