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

#ifndef MATLOOP_EOS_HPP_
#define MATLOOP_EOS_HPP_

#include <span>

namespace matloop::calc {

// Third-order Birch–Murnaghan parameters. b0 in eV/Å³.
struct BirchMurnaghan {
  double e0 = 0.0;
  double v0 = 0.0;
  double b0 = 0.0;
  double b0_prime = 0.0;

  double energy(double volume) const;
};

struct EosFit {
  BirchMurnaghan params;
  double rms_residual = 0.0;  // eV
};

// Least-squares fit of E(V). The third-order form is a cubic in V^(-2/3);
// the cubic is fitted linearly and the four parameters are read off its
// stationary point.
// errors: EOSFitFailure (fewer than 4 points, no minimum with positive
// curvature, or rms residual above 1e-3 of the sampled energy spread)
EosFit fit_birch_murnaghan(std::span<const double> volumes, std::span<const double> energies);

}  // namespace matloop::calc

#endif  // MATLOOP_EOS_HPP_
