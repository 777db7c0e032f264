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

#include <map>
#include <string>
#include <vector>

#include "polyspec/tensor.hpp"

namespace polyspec {

// Units: all rates and beta^2 in 1/ns, angular frequencies in rad/ns,
// Hamiltonians stored pre-divided by hbar (units 1/ns).

struct HilbertFactor {
  std::string label;
  Eigen::Index dim{0};
  std::vector<std::string> basis_labels;
};

struct JumpTerm {
  double rate{0.0};  // 1/ns, >= 0
  CMat op;           // on the full space
};

/// Assembled open-system model: Liouvillian, measurement operator, noise
/// strength and named parameters. Immutable after construction.
struct LiouvillianModel {
  std::vector<HilbertFactor> factors;
  CMat hamiltonian;                 // full space, Hermitian, 1/ns
  std::vector<JumpTerm> jumps;      // full space
  CMat measurement_op;              // A on the full space
  double beta2{0.0};                // beta^2, 1/ns
  SuperOperator liouvillian;        // i[rho,H] + sum gamma_j D[d_j] + beta^2 D[A]
  std::map<std::string, double> params;
  std::map<std::string, CMat> observables;  // named operators for trace recording

  Eigen::Index dim() const { return hamiltonian.rows(); }
  double beta() const { return std::sqrt(beta2); }
  /// Hash of dimensions and named parameters, for trajectory sidecars.
  std::string fingerprint() const;
};

/// Pauli matrices and spin-1/2 operators s_i = sigma_i / 2.
CMat pauli_x();
CMat pauli_y();
CMat pauli_z();
CMat spin_x();
CMat spin_y();
CMat spin_z();

/// x -> (A x + x A^dag)/2
SuperOperator measurement_superop(const CMat& a);
/// x -> A'x = (A x + x A^dag)/2 - Tr[(A rho0 + rho0 A^dag)/2] x
SuperOperator modified_measurement_superop(const CMat& a, const CMat& rho0);

LiouvillianModel build_lindblad(std::vector<HilbertFactor> factors, const CMat& h,
                                std::vector<JumpTerm> jumps, const CMat& a, double beta2,
                                std::map<std::string, double> params = {});

/// System-only specification handed to the measurement-model builders.
struct SystemSpec {
  std::vector<HilbertFactor> factors;
  CMat hamiltonian;             // system space
  std::vector<JumpTerm> jumps;  // system space
  std::map<std::string, double> params;
  std::map<std::string, CMat> observables;  // system space
  Eigen::Index dim() const { return hamiltonian.rows(); }
};

/// H_s = omega_L s_x on a single spin-1/2.
SystemSpec single_spin_system(double omega_larmor);

/// Two coupled spins in a tilted field plus optional relaxation of spin 1:
/// H_s = omega_L1 (sin phi s_x1 + cos phi s_z1)
///     + omega_L2 (sin phi s_x2 + cos phi s_z2)
///     + g_c (s_x1 s_x2 + s_y1 s_y2 + s_z1 s_z2),
/// jump (gamma_s/2) D[|down><up| (x) 1] on spin 1.
SystemSpec two_spin_system(double omega_l1, double omega_l2, double g_c, double phi,
                           double gamma_s);

/// Random-time probing model on system (x) interaction (x) detector, with
/// photon creation, polarization-conserving transfer, projective detection
/// of the 0/90 linear polarizations and detector reset.
LiouvillianModel build_random_time_model(const SystemSpec& system, const CMat& probe_coupling,
                                         double g, double gamma_p, double gamma_out,
                                         double gamma_det, double beta2);

/// Plain continuous measurement of a system operator.
LiouvillianModel build_continuous_model(const SystemSpec& system, const CMat& a_sys,
                                        double beta2);

}  // namespace polyspec
