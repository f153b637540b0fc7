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

#ifndef MATLOOP_RELAX_HPP_
#define MATLOOP_RELAX_HPP_

#include <string>
#include <vector>

#include "matloop/potential.hpp"

namespace matloop::calc {

struct TaskParams {
  std::string optimizer = "fire";
  double fmax = 0.05;  // eV/Å, max per-atom force norm
  int max_steps = 500;
  bool cell_relax = true;
};

struct FireParams {
  double dt_start = 0.1;
  double dt_max = 1.0;
  int n_min = 5;
  double f_inc = 1.1;
  double f_dec = 0.5;
  double alpha_start = 0.1;
  double f_alpha = 0.99;
  double max_move = 0.2;  // Å per atom per step
};

struct RelaxationOutcome {
  Structure final_structure;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double max_force = 0.0;
  int steps_taken = 0;
  bool converged = false;
  // Energy of every accepted configuration, starting with the input.
  std::vector<double> trajectory_energies;
};

// Relative tolerance of the isotropic lattice-scale line search.
inline constexpr double kScaleTolerance = 1e-6;

// FIRE relaxation of atomic positions; with task.cell_relax the position
// stage alternates with a golden-section search over a uniform lattice
// scale until both stages stop moving. Uphill steps are rejected and reset
// the velocities, so trajectory_energies never increases.
// errors: UnsupportedOptimizer, NumericalBlowup
RelaxationOutcome relax(const Structure& s, const PotentialParams& p, const TaskParams& task,
                        Precision precision = Precision::kFloat64, const FireParams& fire = {});

// Golden-section minimum of f on [lo, hi] to relative tolerance `rel_tol`.
template <typename F>
double golden_section_min(F&& f, double lo, double hi, double rel_tol) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > rel_tol * 0.5 * (std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace matloop::calc

#endif  // MATLOOP_RELAX_HPP_
