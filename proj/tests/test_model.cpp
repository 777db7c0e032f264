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

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "polyspec/model.hpp"
#include "polyspec/spectra.hpp"
#include "test_helpers.hpp"

using namespace polyspec;
using test::linspace;
using test::max_abs_diff;
using test::random_density;
using test::random_hermitian;

namespace {

std::vector<cxd> sorted_eigs(const CMat& m) {
  Eigen::ComplexEigenSolver<CMat> es(m, false);
  std::vector<cxd> v(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(v.begin(), v.end(), [](cxd a, cxd b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

LiouvillianModel paper_single_spin(double gamma_p, double omega_l = 2.0 * M_PI,
                                   double g = 100.0) {
  return build_random_time_model(single_spin_system(omega_l), spin_z(), g, gamma_p, 100.0,
                                 100.0, 1e4);
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("empty model has a vanishing Liouvillian") {
  const CMat z = CMat::Zero(2, 2);
  auto m = build_lindblad({{"sys", 2, {}}}, z, {}, z, 0.0);
  CHECK(m.liouvillian.matrix.cwiseAbs().maxCoeff() == 0.0);
  CHECK(max_abs_diff(m.liouvillian.apply(random_density(2, 1)), CMat::Zero(2, 2)) == 0.0);
}

TEST_CASE("pure precession spectrum is {0, 0, +i wL, -i wL}") {
  const double wl = 3.7;
  auto m = build_lindblad({{"spin", 2, {}}}, wl * spin_x(), {}, CMat::Zero(2, 2), 0.0);
  const auto eigs = sorted_eigs(m.liouvillian.matrix);
  CHECK(std::abs(eigs[0] - cxd{0.0, -wl}) < 1e-12);
  CHECK(std::abs(eigs[1]) < 1e-12);
  CHECK(std::abs(eigs[2]) < 1e-12);
  CHECK(std::abs(eigs[3] - cxd{0.0, wl}) < 1e-12);
}

TEST_CASE("dephasing shifts the coherence eigenvalues by -beta^2/2") {
  // H = wL s_z commutes with A = s_z, so the z-basis coherences keep their
  // +-i wL precession and pick up exactly beta^2/2 damping.
  const double wl = 2.2, beta2 = 0.6;
  auto m = build_lindblad({{"spin", 2, {}}}, wl * spin_z(), {}, spin_z(), beta2);
  const auto eigs = sorted_eigs(m.liouvillian.matrix);
  CHECK(std::abs(eigs[0] - cxd{-beta2 / 2, -wl}) < 1e-12);
  CHECK(std::abs(eigs[1] - cxd{-beta2 / 2, wl}) < 1e-12);
  CHECK(std::abs(eigs[2]) < 1e-12);
  CHECK(std::abs(eigs[3]) < 1e-12);
}

TEST_CASE("build_lindblad validates inputs") {
  const CMat z2 = CMat::Zero(2, 2);
  CHECK_THROWS_AS(build_lindblad({{"s", 2, {}}}, test::random_cmat(2, 2, 5), {}, z2, 0.0),
                  DimensionError);  // non-Hermitian H
  CHECK_THROWS_AS(build_lindblad({{"s", 3, {}}}, z2, {}, z2, 0.0), DimensionError);
  CHECK_THROWS_AS(build_lindblad({{"s", 2, {}}}, z2, {{-0.1, z2}}, z2, 0.0), DimensionError);
  CHECK_THROWS_AS(build_lindblad({{"s", 2, {}}}, z2, {}, z2, -1.0), DimensionError);
}

TEST_CASE("measurement superoperator basics") {
  CHECK(max_abs_diff(measurement_superop(CMat::Identity(3, 3)).matrix,
                     CMat::Identity(9, 9)) < 1e-14);

  // Traceless case: A = s_z against rho0 = I/2 leaves A' = A.
  const CMat rho_mix = 0.5 * CMat::Identity(2, 2);
  CHECK(max_abs_diff(modified_measurement_superop(spin_z(), rho_mix).matrix,
                     measurement_superop(spin_z()).matrix) < 1e-14);

  // Tr(A' rho0) = 0 for any valid state.
  const CMat a = test::random_cmat(3, 3, 7);
  const CMat rho0 = random_density(3, 8);
  const CMat ap = unvectorize(modified_measurement_superop(a, rho0).matrix * vectorize(rho0));
  CHECK(std::abs(ap.trace()) < 1e-12);
}

TEST_CASE("every built model preserves trace and hermiticity") {
  std::vector<LiouvillianModel> models;
  models.push_back(test::random_lindblad_model(3, 11));
  models.push_back(paper_single_spin(0.5));
  models.push_back(build_continuous_model(single_spin_system(2 * M_PI), spin_z(), 0.5));
  for (const auto& m : models) {
    const auto t = trace_functional(m.dim());
    CHECK((t * m.liouvillian.matrix).cwiseAbs().maxCoeff() <
          1e-10 * std::max(1.0, m.liouvillian.matrix.cwiseAbs().maxCoeff()));
    const CMat rho = random_hermitian(m.dim(), 13);
    CHECK(is_hermitian(m.liouvillian.apply(rho), 1e-10));
  }
}

TEST_CASE("stored pieces reassemble the Liouvillian") {
  const auto m = paper_single_spin(0.5);
  SuperOperator rebuilt = commutator_superop(m.hamiltonian);
  for (const auto& j : m.jumps) {
    SuperOperator d = dissipator(j.op);
    d *= cxd{j.rate, 0.0};
    rebuilt += d;
  }
  SuperOperator dm = dissipator(m.measurement_op);
  dm *= cxd{m.beta2, 0.0};
  rebuilt += dm;
  const double scale = m.liouvillian.matrix.cwiseAbs().maxCoeff();
  CHECK(max_abs_diff(rebuilt.matrix, m.liouvillian.matrix) < 1e-12 * scale);
}

TEST_CASE("paper parameters build an 18-dimensional Hilbert space") {
  const auto m = paper_single_spin(0.5);
  CHECK(m.dim() == 18);
  CHECK(m.liouvillian.matrix.rows() == 324);
  CHECK(m.factors.size() == 3);
  CHECK(m.params.at("gamma_p") == 0.5);
}

TEST_CASE("transfer jump is invariant under the polarization basis choice") {
  // Circular construction (as built) vs the same operator assembled in the
  // 0/90 linear basis.
  const auto m = paper_single_spin(0.5);
  const CMat& d_ab = m.jumps[1].op;

  const Eigen::Index ns = 2, np = 3;
  CVec a0(np), a90(np), b0(np), b90(np);
  a0 << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0;
  a90 << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0;
  b0 = a0;
  b90 = a90;
  CVec av = CVec::Zero(np), bv = CVec::Zero(np);
  av(2) = 1;
  bv(2) = 1;
  const CMat id_s = CMat::Identity(ns, ns);
  CMat lin = kron(id_s, kron(av * a0.adjoint(), b0 * bv.adjoint())) +
             kron(id_s, kron(av * a90.adjoint(), b90 * bv.adjoint()));
  CHECK(max_abs_diff(lin, d_ab) < 1e-12);
  CHECK(max_abs_diff(dissipator(lin).matrix, dissipator(d_ab).matrix) < 1e-12);

  // The detector-reset dissipator sum is basis invariant as well.
  const SuperOperator built = dissipator(m.jumps[2].op) + dissipator(m.jumps[3].op);
  CMat be_p = kron(id_s, kron(CMat::Identity(np, np), bv * CVec::Unit(np, 0).adjoint()));
  CMat be_m = kron(id_s, kron(CMat::Identity(np, np), bv * CVec::Unit(np, 1).adjoint()));
  const SuperOperator circ = dissipator(be_p) + dissipator(be_m);
  CHECK(max_abs_diff(built.matrix, circ.matrix) < 1e-12);
}

TEST_CASE("g = 0 decouples the photon sector from the system") {
  // A small system relaxation keeps the steady state unique; the spectra
  // must then be blind to the system Hamiltonian.
  CMat lower = CMat::Zero(2, 2);
  lower(1, 0) = 1.0;
  auto make = [&](double wl) {
    auto sys = single_spin_system(wl);
    sys.jumps.push_back({0.2, lower});
    return build_random_time_model(sys, spin_z(), 0.0, 0.5, 100.0, 100.0, 1e4);
  };
  const auto ma = make(2 * M_PI);
  const auto mb = make(2 * M_PI * 3.1);
  const auto grid = linspace(0.0, 300.0, 40);
  const SpectraEvaluator ea(ma), eb(mb);
  for (double w : grid)
    CHECK(std::abs(ea.s2_at(w) - eb.s2_at(w)) < 1e-9 * std::abs(ea.s2_at(w)));
}

TEST_CASE("g = 0 steady state factorizes over system and photon sectors") {
  auto sys = two_spin_system(2 * M_PI * 1.5, 0.0, 2 * M_PI * 1.5, M_PI / 6, 0.05);
  const auto full = build_random_time_model(sys, kron(spin_z(), CMat::Identity(2, 2)), 0.0,
                                            5.0, 100.0, 100.0, 1e4);
  const CMat rho_full = steady_state(full);
  const CMat marginal = partial_trace_rest(rho_full, 4, 9);

  const auto sys_only =
      build_lindblad(sys.factors, sys.hamiltonian, sys.jumps, CMat::Zero(4, 4), 0.0);
  CHECK(max_abs_diff(marginal, steady_state(sys_only)) < 1e-9);
}

TEST_CASE("two-spin system basics") {
  // Decoupled, untilted: energies are the +-wL/2 combinations.
  auto s = two_spin_system(3.0, 1.0, 0.0, 0.0, 0.0);
  Eigen::SelfAdjointEigenSolver<CMat> es(s.hamiltonian);
  Eigen::VectorXd e = es.eigenvalues();
  std::sort(e.data(), e.data() + 4);
  CHECK(e(0) == doctest::Approx(-2.0));
  CHECK(e(1) == doctest::Approx(-1.0));
  CHECK(e(2) == doctest::Approx(1.0));
  CHECK(e(3) == doctest::Approx(2.0));

  CHECK_THROWS_AS(two_spin_system(1.0, 0.0, 1.0, 0.0, -0.1), DimensionError);
}

TEST_CASE("two-spin relaxation gives a negative steady spin-1 z projection") {
  auto sys = two_spin_system(2 * M_PI * 1.5, 0.0, 2 * M_PI * 1.5, M_PI / 6, 0.05);
  const CMat s_c = kron(spin_z(), CMat::Identity(2, 2));
  const auto m = build_random_time_model(sys, s_c, 50.0, 5.0, 100.0, 100.0, 1e4);
  CHECK(m.dim() == 36);
  const CMat rho0 = steady_state(m);
  const double sz1 = (m.observables.at("sz1") * rho0).trace().real();
  CHECK(sz1 < 0.0);
}

TEST_CASE("continuous model with beta = 0 has only the noise floor") {
  auto m = build_continuous_model(single_spin_system(2 * M_PI), spin_z(), 0.0);
  // With beta = 0 the measurement term is absent and z(t) would be pure
  // noise; s2 evaluates to exactly the (zero) floor.
  const auto sysspec = single_spin_system(2 * M_PI);
  CHECK(m.beta2 == 0.0);
  CHECK(max_abs_diff(m.liouvillian.matrix, commutator_superop(sysspec.hamiltonian).matrix) <
        1e-14);
}

TEST_CASE("measurement-induced decay grows with beta^2 below the Zeno crossover") {
  // Track the oscillating coherence pair of H = wL s_x with A = s_z; its
  // damping is beta^2/4 while underdamped.
  const double wl = 2 * M_PI;
  double prev = 0.0;
  for (double beta2 : {0.5, 1.0, 2.0}) {
    auto m = build_continuous_model(single_spin_system(wl), spin_z(), beta2);
    const auto eigs = sorted_eigs(m.liouvillian.matrix);
    double decay = 1e300;
    for (const auto& e : eigs)
      if (std::abs(e.imag()) > 0.1) decay = std::min(decay, -e.real());
    CHECK(decay == doctest::Approx(beta2 / 4).epsilon(1e-9));
    CHECK(decay > prev);
    prev = decay;
  }
}

TEST_CASE("random-time builder validates rates and coupling operator") {
  auto sys = single_spin_system(1.0);
  CHECK_THROWS_AS(build_random_time_model(sys, test::random_cmat(2, 2, 3), 1, 1, 1, 1, 1),
                  DimensionError);
  CHECK_THROWS_AS(build_random_time_model(sys, spin_z(), 1, -1, 1, 1, 1), DimensionError);
  CHECK_THROWS_AS(build_random_time_model(sys, CMat::Zero(3, 3), 1, 1, 1, 1, 1),
                  DimensionError);
}

TEST_SUITE_END();
