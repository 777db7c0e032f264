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

#include <vector>

#include "polyspec/tensor.hpp"

namespace polyspec {

/// Contiguous column range of the decomposition belonging to one eigenvalue
/// cluster. For size 1 the restriction t is just the eigenvalue; larger
/// blocks carry the (generally non-diagonal) restriction of the operator to
/// the cluster's invariant subspace.
struct SpectralBlock {
  Eigen::Index offset{0};
  Eigen::Index size{1};
  CMat t;
};

/// Spectral decomposition of a Liouvillian: L = right * blkdiag(t) * left^dag
/// with left^dag * right = I. Away from degeneracies every block is 1x1 and
/// the columns are biorthonormal left/right eigenvector pairs. Exactly one
/// 1x1 block is flagged as the zero mode; all other eigenvalues satisfy
/// Re(lambda) <= zero tolerance.
struct SpectralDecomposition {
  CVec eigenvalues;    // per column, units 1/ns
  CMat right;          // columns r_j / block bases
  CMat left;           // columns l_j / block bases
  std::vector<SpectralBlock> blocks;
  Eigen::Index zero_index{0};  // column (and block) of the null mode
  CMat steady_state;           // hermitized, unit trace

  Eigen::Index dim() const { return steady_state.rows(); }
  Eigen::Index modes() const { return eigenvalues.size(); }
  bool has_nontrivial_blocks() const;

  /// right * blkdiag(t) * left^dag (reconstruction of the decomposed matrix).
  CMat reconstruct() const;
};

struct EigOptions {
  double zero_tol_rel = 1e-9;      // |lambda| < tol * max|lambda| flags the null mode
  double cluster_tol_rel = 1e-8;   // eigenvalue clustering radius
  double max_cluster_cond = 1e8;   // beyond this the cluster is treated as defective
  double biortho_tol = 1e-8;       // residual bound on |L^dag R - I|
  // With allow_blocks, degenerate-to-tolerance clusters become invariant-
  // subspace blocks instead of failing; defective Liouvillians (e.g. equal
  // cascade rates) stay exactly representable.
  bool allow_blocks = false;
};

SpectralDecomposition eig_biorthonormal(const SuperOperator& liouvillian,
                                        const EigOptions& opts = {});

/// Null vector of a trace-preserving Liouvillian, normalized and hermitized.
/// LU-based fast path; no eigendecomposition.
CMat steady_state_lu(const SuperOperator& liouvillian);

}  // namespace polyspec
