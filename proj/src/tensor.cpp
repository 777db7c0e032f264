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

#include "polyspec/tensor.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace polyspec {

CMat SuperOperator::apply(const CMat& rho) const {
  if (rho.rows() != dim || rho.cols() != dim)
    throw DimensionError("SuperOperator::apply: state dimension mismatch");
  return unvectorize(matrix * vectorize(rho));
}

SuperOperator& SuperOperator::operator+=(const SuperOperator& o) {
  if (dim != o.dim) throw DimensionError("SuperOperator: dimension mismatch in +");
  matrix += o.matrix;
  return *this;
}

SuperOperator& SuperOperator::operator-=(const SuperOperator& o) {
  if (dim != o.dim) throw DimensionError("SuperOperator: dimension mismatch in -");
  matrix -= o.matrix;
  return *this;
}

SuperOperator& SuperOperator::operator*=(cxd s) {
  matrix *= s;
  return *this;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat c(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return c;
}

CVec vectorize(const CMat& rho) {
  if (rho.rows() != rho.cols())
    throw DimensionError("vectorize: input must be square");
  return Eigen::Map<const CVec>(rho.data(), rho.size());
}

CMat unvectorize(const CVec& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (n * n != v.size())
    throw DimensionError("unvectorize: length is not a perfect square");
  return Eigen::Map<const CMat>(v.data(), n, n);
}

Eigen::RowVectorXcd trace_functional(Eigen::Index dim) {
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(dim * dim);
  for (Eigen::Index i = 0; i < dim; ++i) t(i * dim + i) = 1.0;
  return t;
}

SuperOperator identity_superop(Eigen::Index dim) {
  return {dim, CMat::Identity(dim * dim, dim * dim)};
}

SuperOperator left_mult(const CMat& a) {
  if (a.rows() != a.cols()) throw DimensionError("left_mult: operator must be square");
  const Eigen::Index n = a.rows();
  return {n, kron(CMat::Identity(n, n), a)};
}

SuperOperator right_mult(const CMat& a) {
  if (a.rows() != a.cols()) throw DimensionError("right_mult: operator must be square");
  const Eigen::Index n = a.rows();
  return {n, kron(a.transpose(), CMat::Identity(n, n))};
}

SuperOperator sandwich(const CMat& a, const CMat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DimensionError("sandwich: operators must be square and of equal dimension");
  return {a.rows(), kron(b.transpose(), a)};
}

SuperOperator commutator_superop(const CMat& h) {
  if (h.rows() != h.cols()) throw DimensionError("commutator_superop: H must be square");
  // i [rho, H] = i (rho H - H rho)
  SuperOperator s = right_mult(h);
  s -= left_mult(h);
  s *= kI;
  return s;
}

SuperOperator dissipator(const CMat& d) {
  if (d.rows() != d.cols()) throw DimensionError("dissipator: jump operator must be square");
  const CMat dd = d.adjoint() * d;
  SuperOperator s = sandwich(d, d.adjoint());
  SuperOperator anti = left_mult(dd);
  anti += right_mult(dd);
  anti *= cxd{0.5, 0.0};
  s -= anti;
  return s;
}

CMat expm(const CMat& m, double t) {
  if (m.rows() != m.cols()) throw DimensionError("expm: matrix must be square");
  if (t < 0) throw DimensionError("expm: t must be non-negative");
  return CMat(m * t).exp();
}

CMat partial_trace_rest(const CMat& rho, Eigen::Index dim_keep, Eigen::Index dim_rest) {
  if (rho.rows() != dim_keep * dim_rest || rho.cols() != rho.rows())
    throw DimensionError("partial_trace_rest: dimensions do not factor the state");
  CMat out = CMat::Zero(dim_keep, dim_keep);
  for (Eigen::Index i = 0; i < dim_keep; ++i)
    for (Eigen::Index j = 0; j < dim_keep; ++j)
      for (Eigen::Index k = 0; k < dim_rest; ++k)
        out(i, j) += rho(i * dim_rest + k, j * dim_rest + k);
  return out;
}

bool is_hermitian(const CMat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

CMat hermitize(const CMat& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace polyspec
