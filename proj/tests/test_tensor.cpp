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

#include "polyspec/tensor.hpp"
#include "test_helpers.hpp"

using namespace polyspec;
using test::max_abs_diff;
using test::random_cmat;
using test::random_density;
using test::random_hermitian;

TEST_SUITE_BEGIN("tensor");

TEST_CASE("kron of identities is the identity") {
  CHECK(max_abs_diff(kron(CMat::Identity(2, 2), CMat::Identity(3, 3)),
                     CMat::Identity(6, 6)) == 0.0);
}

TEST_CASE("kron of sigma_z with identity is diag(1,1,-1,-1)") {
  CMat sz(2, 2);
  sz << 1, 0, 0, -1;
  CMat expected = CMat::Zero(4, 4);
  expected.diagonal() << 1, 1, -1, -1;
  CHECK(max_abs_diff(kron(sz, CMat::Identity(2, 2)), expected) == 0.0);
}

TEST_CASE("kron entries match the direct index formula") {
  // Independent oracle: C(p,q) = a(p / rb, q / cb) * b(p % rb, q % cb).
  const CMat a = random_cmat(2, 2, 11);
  const CMat b = random_cmat(3, 3, 12);
  const CMat c = kron(a, b);
  for (Eigen::Index p = 0; p < 6; ++p)
    for (Eigen::Index q = 0; q < 6; ++q)
      CHECK(std::abs(c(p, q) - a(p / 3, q / 3) * b(p % 3, q % 3)) == 0.0);
}

TEST_CASE("kron is associative") {
  const CMat a = random_cmat(2, 3, 1), b = random_cmat(3, 2, 2), c = random_cmat(2, 2, 3);
  CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) < 1e-14);
}

TEST_CASE("vectorize stacks columns") {
  CVec v = vectorize(CMat::Identity(2, 2));
  CVec expected(4);
  expected << 1, 0, 0, 1;
  CHECK(max_abs_diff(v, expected) == 0.0);
}

TEST_CASE("unvectorize inverts vectorize") {
  const CMat r = random_cmat(4, 4, 21);
  CHECK(max_abs_diff(unvectorize(vectorize(r)), r) == 0.0);
}

TEST_CASE("vec(AXB) = (B^T kron A) vec(X)") {
  const CMat a = random_cmat(3, 3, 31), x = random_cmat(3, 3, 32), b = random_cmat(3, 3, 33);
  CHECK(max_abs_diff(vectorize(a * x * b), kron(b.transpose(), a) * vectorize(x)) < 1e-12);
}

TEST_CASE("vectorize rejects non-square input") {
  CHECK_THROWS_AS(vectorize(random_cmat(2, 3, 41)), DimensionError);
  CHECK_THROWS_AS(unvectorize(CVec::Zero(5)), DimensionError);
}

TEST_CASE("dissipator acts as two-level decay") {
  CMat d = CMat::Zero(2, 2);
  d(0, 1) = 1;  // |0><1|
  CMat rho = CMat::Zero(2, 2);
  rho(1, 1) = 1;
  CMat expected(2, 2);
  expected << 1, 0, 0, -1;
  CHECK(max_abs_diff(dissipator(d).apply(rho), expected) < 1e-14);
}

TEST_CASE("dissipator of the identity vanishes") {
  CHECK(dissipator(CMat::Identity(3, 3)).matrix.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dissipator preserves the trace") {
  const CMat d = random_cmat(4, 4, 51);
  const CMat rho = random_cmat(4, 4, 52);
  CHECK(std::abs(dissipator(d).apply(rho).trace()) < 1e-12);
  CHECK_THROWS_AS(dissipator(random_cmat(2, 3, 53)), DimensionError);
}

TEST_CASE("trace functional annihilates dissipator and commutator superoperators") {
  const auto t = trace_functional(4);
  const SuperOperator dd = dissipator(random_cmat(4, 4, 61));
  const SuperOperator cc = commutator_superop(random_hermitian(4, 62));
  CHECK((t * dd.matrix).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((t * cc.matrix).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("superoperators realize their defining operator maps") {
  const CMat a = random_cmat(3, 3, 71), rho = random_cmat(3, 3, 72);
  CHECK(max_abs_diff(left_mult(a).apply(rho), a * rho) < 1e-12);
  CHECK(max_abs_diff(right_mult(a).apply(rho), rho * a) < 1e-12);
  CHECK(max_abs_diff(commutator_superop(a).apply(rho), kI * (rho * a - a * rho)) < 1e-12);
  const CMat d = random_cmat(3, 3, 73);
  const CMat dir = d * rho * d.adjoint() -
                   0.5 * (d.adjoint() * d * rho + rho * d.adjoint() * d);
  CHECK(max_abs_diff(dissipator(d).apply(rho), dir) < 1e-12);
}

TEST_CASE("expm trivial cases") {
  CHECK(max_abs_diff(expm(CMat::Zero(3, 3), 2.0), CMat::Identity(3, 3)) < 1e-14);
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = cxd{-0.3, 1.0};
  d(1, 1) = cxd{-1.0, -2.0};
  CMat e = expm(d, 1.7);
  CHECK(std::abs(e(0, 0) - std::exp(d(0, 0) * 1.7)) < 1e-12);
  CHECK(std::abs(e(1, 1) - std::exp(d(1, 1) * 1.7)) < 1e-12);
  CHECK(std::abs(e(0, 1)) == 0.0);
  CHECK_THROWS_AS(expm(d, -1.0), DimensionError);
}

TEST_CASE("expm agrees with the eigendecomposition route") {
  // Oracle: build M = V D V^-1 with a stable diagonal, exponentiate D.
  const Eigen::Index n = 5;
  CMat v = random_cmat(n, n, 81) + 3.0 * CMat::Identity(n, n);
  CVec d(n);
  std::mt19937_64 gen(82);
  std::uniform_real_distribution<double> ur(0.1, 2.0), ui(-3.0, 3.0);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = cxd{-ur(gen), ui(gen)};
  const CMat vinv = v.inverse();
  const CMat m = v * d.asDiagonal() * vinv;
  for (double t : {0.0, 0.5, 2.0}) {
    const CMat via_eig = v * CVec((d * t).array().exp()).asDiagonal() * vinv;
    CHECK(max_abs_diff(expm(m, t), via_eig) < 1e-8);
  }
}

TEST_CASE("partial trace over the trailing factor") {
  const CMat ra = random_density(2, 91), rb = random_density(3, 92);
  CHECK(max_abs_diff(partial_trace_rest(kron(ra, rb), 2, 3), ra) < 1e-12);
}

TEST_CASE("hermitian helpers") {
  CHECK(is_hermitian(random_hermitian(4, 95)));
  CMat m = random_cmat(4, 4, 96);
  CHECK(!is_hermitian(m));
  CHECK(is_hermitian(hermitize(m)));
}

TEST_SUITE_END();
