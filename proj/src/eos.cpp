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

#include "matloop/eos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "matloop/error.hpp"

namespace matloop::calc {

double BirchMurnaghan::energy(double volume) const {
  const double eta = std::cbrt(v0 / volume) * std::cbrt(v0 / volume);
  const double d = eta - 1.0;
  return e0 + 9.0 * v0 * b0 / 16.0 * (d * d * d * b0_prime + d * d * (6.0 - 4.0 * eta));
}

EosFit fit_birch_murnaghan(std::span<const double> volumes, std::span<const double> energies) {
  const std::size_t n = volumes.size();
  if (n < 4 || energies.size() != n) throw Error("EOSFitFailure", "need at least 4 (V, E) samples");

  // x = V^(-2/3), centred and scaled to t = x/x_ref - 1 for conditioning.
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(volumes[i], -2.0 / 3.0);
  const double x_ref = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double e_ref = std::accumulate(energies.begin(), energies.end(), 0.0) / static_cast<double>(n);

  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = x[i] / x_ref - 1.0;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    a(i, 3) = t * t * t;
    rhs(i) = energies[i] - e_ref;
  }
  const Eigen::Vector4d c = a.colPivHouseholderQr().solve(rhs);

  // Stationary points of c0 + c1 t + c2 t² + c3 t³.
  const double qa = 3.0 * c(3), qb = 2.0 * c(2), qc = c(1);
  std::vector<double> roots;
  if (std::abs(qa) < 1e-14 * (std::abs(qb) + std::abs(qc))) {
    if (qb != 0.0) roots.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      // Numerically stable pair of roots.
      const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
      roots.push_back(q / qa);
      if (q != 0.0) roots.push_back(qc / q);
    }
  }
  double t0 = 0.0;
  bool found = false;
  for (double r : roots) {
    const double curv = 2.0 * c(2) + 6.0 * c(3) * r;
    if (curv > 0.0 && (!found || std::abs(r) < std::abs(t0))) {
      t0 = r;
      found = true;
    }
  }
  if (!found) throw Error("EOSFitFailure", "fitted E(V) has no minimum with positive curvature");

  // Derivatives with respect to x at the minimum.
  const double e_xx = (2.0 * c(2) + 6.0 * c(3) * t0) / (x_ref * x_ref);
  const double e_xxx = 6.0 * c(3) / (x_ref * x_ref * x_ref);
  const double x0 = x_ref * (1.0 + t0);
  if (!(x0 > 0.0)) throw Error("EOSFitFailure", "fitted minimum at non-physical volume");

  EosFit fit;
  auto& bm = fit.params;
  bm.v0 = std::pow(x0, -1.5);
  bm.e0 = e_ref + c(0) + c(1) * t0 + c(2) * t0 * t0 + c(3) * t0 * t0 * t0;
  // B0 = V d²E/dV² = (4/9) E_xx V0^(-7/3); B0' = 4 + (2/3) x0 E_xxx / E_xx.
  bm.b0 = 4.0 / 9.0 * e_xx * std::pow(bm.v0, -7.0 / 3.0);
  bm.b0_prime = 4.0 + 2.0 / 3.0 * x0 * e_xxx / e_xx;

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = bm.energy(volumes[i]) - energies[i];
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  if (fit.rms_residual > 1e-3 * (*hi - *lo) + 1e-14)
    throw Error("EOSFitFailure", "Birch-Murnaghan residual too large");
  return fit;
}

}  // namespace matloop::calc
