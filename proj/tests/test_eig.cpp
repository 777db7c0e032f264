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

#include <algorithm>

#include "polyspec/eig.hpp"
#include "test_helpers.hpp"

using namespace polyspec;
using test::max_abs_diff;

namespace {

SuperOperator two_level_decay(double gamma) {
  CMat d = CMat::Zero(2, 2);
  d(0, 1) = 1;  // |0><1|
  SuperOperator s = dissipator(d);
  s *= cxd{gamma, 0.0};
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("eig");

TEST_CASE("two-level decay spectrum is {0, -g/2, -g/2, -g}") {
  // Analytic diagonalization of the 4x4 Liouvillian: populations relax at
  // gamma, the two coherences at gamma/2.
  const double gamma = 0.8;
  const auto dec = eig_biorthonormal(two_level_decay(gamma));
  std::vector<double> re(4), im(4);
  for (int i = 0; i < 4; ++i) {
    re[i] = dec.eigenvalues(i).real();
    im[i] = dec.eigenvalues(i).imag();
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-gamma).epsilon(1e-12));
  CHECK(re[1] == doctest::Approx(-gamma / 2).epsilon(1e-12));
  CHECK(re[2] == doctest::Approx(-gamma / 2).epsilon(1e-12));
  CHECK(std::abs(re[3]) < 1e-12);
  for (double v : im) CHECK(std::abs(v) < 1e-12);

  // The degenerate -gamma/2 pair exercises the cluster handling.
  CMat gram = dec.left.adjoint() * dec.right;
  CHECK(max_abs_diff(gram, CMat::Identity(4, 4)) < 1e-8);

  CMat ground = CMat::Zero(2, 2);
  ground(0, 0) = 1;
  CHECK(max_abs_diff(dec.steady_state, ground) < 1e-10);
}

TEST_CASE("reconstruction and biorthonormality on random stable Liouvillians") {
  for (uint64_t seed : {101u, 202u, 303u}) {
    const auto model = test::random_lindblad_model(3, seed);
    const auto dec = eig_biorthonormal(model.liouvillian);
    const double scale = model.liouvillian.matrix.cwiseAbs().maxCoeff();
    CHECK(max_abs_diff(dec.reconstruct(), model.liouvillian.matrix) < 1e-8 * scale);
    CMat gram = dec.left.adjoint() * dec.right;
    CHECK(max_abs_diff(gram, CMat::Identity(9, 9)) < 1e-8);

    // steady-state contract
    CHECK(std::abs(dec.steady_state.trace().real() - 1.0) < 1e-12);
    CHECK(is_hermitian(dec.steady_state, 1e-10));
    CHECK((model.liouvillian.matrix * vectorize(dec.steady_state)).norm() <
          1e-10 * model.liouvillian.matrix.norm());
  }
}

TEST_CASE("zero operator is rejected") {
  SuperOperator z{2, CMat::Zero(4, 4)};
  CHECK_THROWS_AS(eig_biorthonormal(z), NumericalError);
}

TEST_CASE("operators without a unique null mode are rejected") {
  // Unitary two-level dynamics: eigenvalues {0, 0, +i w, -i w}.
  CMat h(2, 2);
  h << 0.0, 0.5, 0.5, 0.0;
  SuperOperator s = commutator_superop(h);
  CHECK_THROWS_AS(eig_biorthonormal(s), NumericalError);
}

TEST_CASE("positive-real-part spectra are rejected") {
  CMat m = CMat::Zero(4, 4);
  m.diagonal() << 0.0, 0.5, -1.0, -2.0;
  CHECK_THROWS_AS(eig_biorthonormal(SuperOperator{2, m}), NumericalError);
}

TEST_CASE("defective clusters fail loudly") {
  // Jordan block at -1: left/right eigenvector overlap is singular.
  CMat m = CMat::Zero(4, 4);
  m(0, 0) = -1.0;
  m(0, 1) = 1.0;
  m(1, 1) = -1.0;
  m(2, 2) = 0.0;
  m(3, 3) = -2.0;
  CHECK_THROWS_AS(eig_biorthonormal(SuperOperator{2, m}), NumericalError);
}

TEST_CASE("block mode decomposes a near-defective cluster") {
  // Perturbed Jordan pair at -1 next to an isolated null mode: scalar
  // biorthonormalization fails, block handling represents it exactly.
  CMat m = CMat::Zero(4, 4);
  m(0, 0) = 0.0;  // null direction with unit trace
  m(1, 1) = -1.0;
  m(1, 2) = 1.0;
  m(2, 1) = 1e-9;
  m(2, 2) = -1.0;
  m(3, 3) = -2.0;
  const SuperOperator s{2, m};
  CHECK_THROWS_AS(eig_biorthonormal(s), NumericalError);

  const auto dec = eig_biorthonormal(s, EigOptions{.allow_blocks = true});
  CHECK(dec.has_nontrivial_blocks());
  CHECK(max_abs_diff(dec.reconstruct(), m) < 1e-8);
  CMat gram = dec.left.adjoint() * dec.right;
  CHECK(max_abs_diff(gram, CMat::Identity(4, 4)) < 1e-10);
  CHECK(dec.zero_index == 0);
}

TEST_CASE("block mode handles the equal-rate cascade Liouvillian") {
  const auto model = build_random_time_model(single_spin_system(2 * M_PI), spin_z(),
                                             100.0, 0.5, 100.0, 100.0, 1e4);
  const auto dec = eig_biorthonormal(model.liouvillian, EigOptions{.allow_blocks = true});
  CHECK(dec.has_nontrivial_blocks());
  CMat gram = dec.left.adjoint() * dec.right;
  CHECK(max_abs_diff(gram, CMat::Identity(324, 324)) < 1e-9);
  // sampled reconstruction
  const CMat& lm = model.liouvillian.matrix;
  const CVec x = test::random_cmat(324, 1, 99).col(0);
  CMat blk = CMat::Zero(324, 324);
  for (const auto& b : dec.blocks) blk.block(b.offset, b.offset, b.size, b.size) = b.t;
  CHECK((lm * x - dec.right * (blk * (dec.left.adjoint() * x))).norm() <
        1e-7 * lm.norm() * x.norm());
  // steady-state contract
  CHECK(std::abs(dec.steady_state.trace().real() - 1.0) < 1e-12);
  CHECK((lm * vectorize(dec.steady_state)).norm() < 1e-10 * lm.norm());
}

TEST_CASE("LU steady state matches the eigendecomposition route") {
  const auto model = test::random_lindblad_model(3, 404);
  const CMat via_lu = steady_state_lu(model.liouvillian);
  const CMat via_eig = eig_biorthonormal(model.liouvillian).steady_state;
  CHECK(max_abs_diff(via_lu, via_eig) < 1e-9);
  CHECK(std::abs(via_lu.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("LU steady state rejects non-trace-preserving input") {
  CMat m = -CMat::Identity(4, 4);
  CHECK_THROWS_AS(steady_state_lu(SuperOperator{2, m}), NumericalError);
}

TEST_SUITE_END();
