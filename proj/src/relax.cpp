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

#include "matloop/relax.hpp"

#include <cmath>

#include "matloop/error.hpp"

namespace matloop::calc {

using structure::operator+;
using structure::operator*;

namespace {

constexpr int kMaxCellCycles = 50;
// Bracket for the lattice-scale search, relative to the current cell.
constexpr double kScaleLo = 0.85;
constexpr double kScaleHi = 1.15;

void check_finite(const std::vector<Vec3>& cart, double energy) {
  if (!std::isfinite(energy)) throw Error("NumericalBlowup", "non-finite energy");
  for (const auto& x : cart)
    for (double c : x)
      if (!std::isfinite(c)) throw Error("NumericalBlowup", "non-finite coordinate");
}

struct FireResult {
  int steps = 0;
  bool converged = false;
};

FireResult fire_positions(Structure& s, EnergyForces& ef, const PotentialParams& p, double fmax,
                          int budget, Precision precision, const FireParams& fp,
                          std::vector<double>& trajectory) {
  const std::size_t n = s.size();
  std::vector<Vec3> v(n, Vec3{0, 0, 0});
  std::vector<Vec3> x = s.cartesian_coords();
  double dt = fp.dt_start;
  double alpha = fp.alpha_start;
  int n_positive = 0;
  FireResult res;

  auto reset = [&] {
    for (auto& vi : v) vi = {0, 0, 0};
    dt *= fp.f_dec;
    alpha = fp.alpha_start;
    n_positive = 0;
  };

  while (true) {
    if (max_force_norm(ef.forces) <= fmax) {
      res.converged = true;
      break;
    }
    if (res.steps >= budget) break;

    double power = 0, vnorm2 = 0, fnorm2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      power += structure::dot(ef.forces[i], v[i]);
      vnorm2 += structure::dot(v[i], v[i]);
      fnorm2 += structure::dot(ef.forces[i], ef.forces[i]);
    }
    if (power > 0.0) {
      const double mixf = alpha * std::sqrt(vnorm2 / fnorm2);
      for (std::size_t i = 0; i < n; ++i) v[i] = (1.0 - alpha) * v[i] + mixf * ef.forces[i];
      if (n_positive > fp.n_min) {
        dt = std::min(dt * fp.f_inc, fp.dt_max);
        alpha *= fp.f_alpha;
      }
      ++n_positive;
    } else if (vnorm2 > 0.0) {
      reset();
    }

    std::vector<Vec3> dr(n);
    double longest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = v[i] + dt * ef.forces[i];
      dr[i] = dt * v[i];
      longest = std::max(longest, structure::norm(dr[i]));
    }
    if (longest > fp.max_move) {
      const double k = fp.max_move / longest;
      for (auto& d : dr) d = k * d;
    }
    std::vector<Vec3> trial_x(n);
    for (std::size_t i = 0; i < n; ++i) trial_x[i] = x[i] + dr[i];
    Structure trial = s;
    trial.set_cartesian(trial_x);
    EnergyForces trial_ef = energy_forces(trial, p, precision);
    check_finite(trial_x, trial_ef.energy);
    ++res.steps;

    if (trial_ef.energy > ef.energy) {
      reset();
      continue;
    }
    s = std::move(trial);
    x = s.cartesian_coords();
    ef = std::move(trial_ef);
    trajectory.push_back(ef.energy);
  }
  return res;
}

}  // namespace

RelaxationOutcome relax(const Structure& start, const PotentialParams& p, const TaskParams& task,
                        Precision precision, const FireParams& fire) {
  if (task.optimizer != "fire")
    throw Error("UnsupportedOptimizer", "unsupported optimizer '" + task.optimizer + "'");

  Structure s = start;
  EnergyForces ef = energy_forces(s, p, precision);
  check_finite(s.cartesian_coords(), ef.energy);

  RelaxationOutcome out;
  out.initial_energy = ef.energy;
  out.trajectory_energies.push_back(ef.energy);

  bool positions_ok = false;
  bool volume_ok = !task.cell_relax;
  for (int cycle = 0; cycle < (task.cell_relax ? kMaxCellCycles : 1); ++cycle) {
    if (task.cell_relax) {
      const auto e_of = [&](double k) { return energy(s.scaled(k), p, precision); };
      const double k = golden_section_min(e_of, kScaleLo, kScaleHi, kScaleTolerance);
      volume_ok = std::abs(k - 1.0) <= kScaleTolerance;
      if (!volume_ok) {
        Structure scaled = s.scaled(k);
        EnergyForces scaled_ef = energy_forces(scaled, p, precision);
        if (scaled_ef.energy <= ef.energy) {
          s = std::move(scaled);
          ef = std::move(scaled_ef);
          out.trajectory_energies.push_back(ef.energy);
        } else {
          volume_ok = true;
        }
      }
    }
    const auto fr = fire_positions(s, ef, p, task.fmax, task.max_steps - out.steps_taken, precision,
                                   fire, out.trajectory_energies);
    out.steps_taken += fr.steps;
    positions_ok = fr.converged;
    if (!task.cell_relax || (positions_ok && volume_ok && fr.steps == 0)) break;
    if (out.steps_taken >= task.max_steps) break;
  }

  out.final_structure = std::move(s);
  out.final_energy = ef.energy;
  out.max_force = max_force_norm(ef.forces);
  out.converged = out.max_force <= task.fmax && volume_ok;
  return out;
}

}  // namespace matloop::calc
