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

#include "polyspec/model.hpp"

#include <cstdint>
#include <sstream>

namespace polyspec {

namespace {

Eigen::Index product_dim(const std::vector<HilbertFactor>& factors) {
  Eigen::Index d = 1;
  for (const auto& f : factors) d *= f.dim;
  return d;
}

void check_factor(const HilbertFactor& f) {
  if (f.dim < 1) throw DimensionError("HilbertFactor '" + f.label + "': dim must be >= 1");
  if (!f.basis_labels.empty() &&
      static_cast<Eigen::Index>(f.basis_labels.size()) != f.dim)
    throw DimensionError("HilbertFactor '" + f.label + "': basis label count != dim");
}

uint64_t fnv1a(uint64_t h, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::string LiouvillianModel::fingerprint() const {
  uint64_t h = 0xcbf29ce484222325ull;
  const int64_t d = dim();
  h = fnv1a(h, &d, sizeof d);
  h = fnv1a(h, &beta2, sizeof beta2);
  for (const auto& [k, v] : params) {
    h = fnv1a(h, k.data(), k.size());
    h = fnv1a(h, &v, sizeof v);
  }
  for (const auto& j : jumps) h = fnv1a(h, &j.rate, sizeof j.rate);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

CMat pauli_x() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMat pauli_y() {
  CMat m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

CMat pauli_z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMat spin_x() { return 0.5 * pauli_x(); }
CMat spin_y() { return 0.5 * pauli_y(); }
CMat spin_z() { return 0.5 * pauli_z(); }

SuperOperator measurement_superop(const CMat& a) {
  if (a.rows() != a.cols()) throw DimensionError("measurement_superop: A must be square");
  SuperOperator s = left_mult(a);
  s += right_mult(a.adjoint());
  s *= cxd{0.5, 0.0};
  return s;
}

SuperOperator modified_measurement_superop(const CMat& a, const CMat& rho0) {
  if (a.rows() != rho0.rows() || rho0.rows() != rho0.cols())
    throw DimensionError("modified_measurement_superop: dimension mismatch");
  SuperOperator s = measurement_superop(a);
  const cxd mean = 0.5 * (a * rho0 + rho0 * a.adjoint()).trace();
  s.matrix -= mean * CMat::Identity(s.matrix.rows(), s.matrix.cols());
  return s;
}

LiouvillianModel build_lindblad(std::vector<HilbertFactor> factors, const CMat& h,
                                std::vector<JumpTerm> jumps, const CMat& a, double beta2,
                                std::map<std::string, double> params) {
  for (const auto& f : factors) check_factor(f);
  const Eigen::Index n = factors.empty() ? h.rows() : product_dim(factors);
  if (h.rows() != n || h.cols() != n)
    throw DimensionError("build_lindblad: Hamiltonian dimension does not match factors");
  if (!is_hermitian(h))
    throw DimensionError("build_lindblad: Hamiltonian is not Hermitian");
  if (a.rows() != n || a.cols() != n)
    throw DimensionError("build_lindblad: measurement operator dimension mismatch");
  if (beta2 < 0) throw DimensionError("build_lindblad: beta^2 must be >= 0");

  SuperOperator liou = commutator_superop(h);
  for (const auto& j : jumps) {
    if (!(j.rate >= 0) || !std::isfinite(j.rate))
      throw DimensionError("build_lindblad: jump rate must be finite and >= 0");
    if (j.op.rows() != n || j.op.cols() != n)
      throw DimensionError("build_lindblad: jump operator dimension mismatch");
    SuperOperator d = dissipator(j.op);
    d *= cxd{j.rate, 0.0};
    liou += d;
  }
  if (beta2 > 0) {
    SuperOperator d = dissipator(a);
    d *= cxd{beta2, 0.0};
    liou += d;
  }

  LiouvillianModel m;
  m.factors = std::move(factors);
  m.hamiltonian = h;
  m.jumps = std::move(jumps);
  m.measurement_op = a;
  m.beta2 = beta2;
  m.liouvillian = std::move(liou);
  m.params = std::move(params);
  m.params["beta2"] = beta2;
  return m;
}

SystemSpec single_spin_system(double omega_larmor) {
  if (!std::isfinite(omega_larmor))
    throw DimensionError("single_spin_system: omega_L must be finite");
  SystemSpec s;
  s.factors = {{"spin", 2, {"up", "down"}}};
  s.hamiltonian = omega_larmor * spin_x();
  s.params["omega_L"] = omega_larmor;
  s.observables["sz"] = spin_z();
  s.observables["sx"] = spin_x();
  return s;
}

SystemSpec two_spin_system(double omega_l1, double omega_l2, double g_c, double phi,
                           double gamma_s) {
  if (!std::isfinite(omega_l1) || !std::isfinite(omega_l2) || !std::isfinite(g_c) ||
      !std::isfinite(phi))
    throw DimensionError("two_spin_system: parameters must be finite");
  if (gamma_s < 0) throw DimensionError("two_spin_system: gamma_s must be >= 0");

  const CMat id2 = CMat::Identity(2, 2);
  const CMat sx1 = kron(spin_x(), id2), sy1 = kron(spin_y(), id2), sz1 = kron(spin_z(), id2);
  const CMat sx2 = kron(id2, spin_x()), sy2 = kron(id2, spin_y()), sz2 = kron(id2, spin_z());

  SystemSpec s;
  s.factors = {{"spin1", 2, {"up", "down"}}, {"spin2", 2, {"up", "down"}}};
  s.hamiltonian = omega_l1 * (std::sin(phi) * sx1 + std::cos(phi) * sz1) +
                  omega_l2 * (std::sin(phi) * sx2 + std::cos(phi) * sz2) +
                  g_c * (sx1 * sx2 + sy1 * sy2 + sz1 * sz2);
  if (gamma_s > 0) {
    CMat lower(2, 2);
    lower << 0, 0, 1, 0;  // |down><up| in the s_z basis
    s.jumps.push_back({0.5 * gamma_s, kron(lower, id2)});
  }
  s.params = {{"omega_L1", omega_l1}, {"omega_L2", omega_l2}, {"g_c", g_c},
              {"phi", phi},           {"gamma_s", gamma_s}};
  s.observables["sz1"] = sz1;
  s.observables["sz2"] = sz2;
  return s;
}

LiouvillianModel build_random_time_model(const SystemSpec& system, const CMat& probe_coupling,
                                         double g, double gamma_p, double gamma_out,
                                         double gamma_det, double beta2) {
  const Eigen::Index ns = system.dim();
  if (probe_coupling.rows() != ns || probe_coupling.cols() != ns)
    throw DimensionError("build_random_time_model: coupling operator not on the system space");
  if (!is_hermitian(probe_coupling))
    throw DimensionError("build_random_time_model: coupling operator must be Hermitian");
  for (double r : {gamma_p, gamma_out, gamma_det})
    if (!(r >= 0) || !std::isfinite(r))
      throw DimensionError("build_random_time_model: rates must be finite and >= 0");

  // Basis order in the photon factors: |+>, |->, |vacuum>.
  const Eigen::Index np = 3;
  const CMat id_s = CMat::Identity(ns, ns);
  const CMat id_a = CMat::Identity(np, np);
  const CMat id_b = CMat::Identity(np, np);

  CMat az = CMat::Zero(np, np);
  az(0, 0) = 0.5;
  az(1, 1) = -0.5;

  CVec a45(np);
  a45 << 1.0 / std::sqrt(2.0), kI / std::sqrt(2.0), 0.0;
  CMat d_a_pol = CMat::Zero(np, np);
  d_a_pol.col(2) = a45;  // |a45><aV|

  // Polarization-conserving transfer a -> b, emptying the interaction region.
  CMat d_ab = CMat::Zero(ns * np * np, ns * np * np);
  for (int pol = 0; pol < 2; ++pol) {
    CMat av_from_pol = CMat::Zero(np, np);
    av_from_pol(2, pol) = 1.0;  // |aV><a_pol|
    CMat bpol_from_v = CMat::Zero(np, np);
    bpol_from_v(pol, 2) = 1.0;  // |b_pol><bV|
    d_ab += kron(id_s, kron(av_from_pol, bpol_from_v));
  }

  CVec b0(np), b90(np);
  b0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  b90 << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
  CVec bv = CVec::Zero(np);
  bv(2) = 1.0;

  const CMat d_be0 = bv * b0.adjoint();
  const CMat d_be90 = bv * b90.adjoint();
  const CMat a_pol = 0.5 * (b0 * b0.adjoint() - b90 * b90.adjoint());

  const CMat h_full = kron(system.hamiltonian, kron(id_a, id_b)) +
                      g * kron(probe_coupling, kron(az, id_b));
  const CMat a_full = kron(id_s, kron(id_a, a_pol));

  std::vector<JumpTerm> jumps;
  jumps.push_back({gamma_p, kron(id_s, kron(d_a_pol, id_b))});
  jumps.push_back({gamma_out, d_ab});
  jumps.push_back({gamma_det, kron(id_s, kron(id_a, d_be0))});
  jumps.push_back({gamma_det, kron(id_s, kron(id_a, d_be90))});
  for (const auto& j : system.jumps)
    jumps.push_back({j.rate, kron(j.op, kron(id_a, id_b))});

  std::vector<HilbertFactor> factors = system.factors;
  factors.push_back({"interaction", np, {"a+", "a-", "aV"}});
  factors.push_back({"detector", np, {"b+", "b-", "bV"}});

  std::map<std::string, double> params = system.params;
  params["g"] = g;
  params["gamma_p"] = gamma_p;
  params["gamma_out"] = gamma_out;
  params["gamma_det"] = gamma_det;

  LiouvillianModel m =
      build_lindblad(std::move(factors), h_full, std::move(jumps), a_full, beta2,
                     std::move(params));
  for (const auto& [label, op] : system.observables)
    m.observables[label] = kron(op, kron(id_a, id_b));
  m.observables["A"] = a_full;
  return m;
}

LiouvillianModel build_continuous_model(const SystemSpec& system, const CMat& a_sys,
                                        double beta2) {
  const Eigen::Index ns = system.dim();
  if (a_sys.rows() != ns || a_sys.cols() != ns)
    throw DimensionError("build_continuous_model: A not on the system space");
  if (!is_hermitian(a_sys))
    throw DimensionError("build_continuous_model: A must be Hermitian");
  LiouvillianModel m = build_lindblad(system.factors, system.hamiltonian, system.jumps,
                                      a_sys, beta2, system.params);
  m.observables = system.observables;
  m.observables["A"] = a_sys;
  return m;
}

}  // namespace polyspec
