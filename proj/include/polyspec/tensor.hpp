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

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "polyspec/errors.hpp"

namespace polyspec {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

constexpr cxd kI{0.0, 1.0};

/// Superoperator acting on column-stacked density matrices.
/// Convention: vec(A X B) = (B^T (x) A) vec(X).
struct SuperOperator {
  Eigen::Index dim{0};  // Hilbert dimension N; matrix is N^2 x N^2
  CMat matrix;

  SuperOperator() = default;
  SuperOperator(Eigen::Index n, CMat m) : dim(n), matrix(std::move(m)) {}

  CMat apply(const CMat& rho) const;

  SuperOperator& operator+=(const SuperOperator& o);
  SuperOperator& operator-=(const SuperOperator& o);
  SuperOperator& operator*=(cxd s);
  friend SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
  friend SuperOperator operator-(SuperOperator a, const SuperOperator& b) { return a -= b; }
  friend SuperOperator operator*(cxd s, SuperOperator a) { return a *= s; }
};

CMat kron(const CMat& a, const CMat& b);

CVec vectorize(const CMat& rho);
CMat unvectorize(const CVec& v);

/// Row functional x -> Tr(unvec(x)), i.e. vec(I)^dagger.
Eigen::RowVectorXcd trace_functional(Eigen::Index dim);

SuperOperator identity_superop(Eigen::Index dim);

/// rho -> a rho
SuperOperator left_mult(const CMat& a);
/// rho -> rho a
SuperOperator right_mult(const CMat& a);
/// rho -> a rho b
SuperOperator sandwich(const CMat& a, const CMat& b);

/// rho -> i [rho, H]
SuperOperator commutator_superop(const CMat& h);

/// Lindblad damping: rho -> d rho d^dag - (d^dag d rho + rho d^dag d)/2
SuperOperator dissipator(const CMat& d);

/// e^{M t}, t >= 0 (scaling-and-squaring Pade).
CMat expm(const CMat& m, double t);

/// Reduced state of the leading factor: rho on H_keep (x) H_rest.
CMat partial_trace_rest(const CMat& rho, Eigen::Index dim_keep, Eigen::Index dim_rest);

bool is_hermitian(const CMat& m, double tol = 1e-12);
CMat hermitize(const CMat& m);

}  // namespace polyspec
