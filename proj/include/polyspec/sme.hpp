// Copyright 2026 The polyspec Authors
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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polyspec/model.hpp"
#include "polyspec/rng.hpp"

namespace polyspec {

struct SimConfig {
  double dt{1e-4};        // ns
  double duration{1.0};   // ns
  uint64_t seed{1};
  std::vector<std::string> record_observables;
  bool renormalize{true};
  // Emission decimation: z is averaged over blocks of this many integration
  // steps before being stored (1 = emit at the step rate). Keeps long
  // estimation runs in memory without touching the integrator step.
  int emit_decimation{1};
  // The stability guard dt * max(rates, |omega|, beta^2) <= 0.05 is enforced
  // on rates and frequencies; for beta^2 this flag relaxes it to
  // dt * beta^2 <= 1 (photon-collapse regime runs are intentionally coarse).
  bool allow_strong_measurement_steps{false};
  int positivity_check_interval{4};

  void validate(const LiouvillianModel& model) const;
};

struct Trajectory {
  double dt{0.0};  // emission sample spacing, ns
  std::vector<double> z;
  uint64_t seed{0};
  std::map<std::string, std::vector<double>> observables;
  std::string model_fingerprint;
};

/// One Ito-Euler step: rho + L(rho) dt + beta S[A](rho) dW, then hermitize
/// and renormalize the trace. S[A](rho) = A rho + rho A^dag - Tr[(A+A^dag) rho] rho.
CMat sme_step(const LiouvillianModel& model, const CMat& rho, double dt, double dw);

Trajectory simulate(const LiouvillianModel& model, const SimConfig& cfg);
Trajectory simulate(const LiouvillianModel& model, const SimConfig& cfg, const CMat& rho_init);
/// Trajectory with an explicit RNG stream id (used by ensembles).
Trajectory simulate_stream(const LiouvillianModel& model, const SimConfig& cfg,
                           const CMat& rho_init, uint64_t stream);

/// Independent trajectories with per-member counter-RNG streams derived from
/// cfg.seed. Bit-identical for a fixed seed regardless of thread count.
std::vector<Trajectory> spawn_ensemble(const LiouvillianModel& model, const SimConfig& cfg,
                                       int n_traj);

}  // namespace polyspec
