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

#include "polyspec/eig.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <complex>
#include <numeric>
#include <vector>

#include <lapacke.h>

namespace polyspec {

namespace {

// Raw zgeev: eigenvalues plus left/right eigenvectors (unit 2-norm columns).
// Left vectors satisfy l^dag M = lambda l^dag.
void zgeev_both(const CMat& m, CVec& w, CMat& vl, CMat& vr) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  CMat a = m;  // destroyed by LAPACK
  w.resize(n);
  vl.resize(n, n);
  vr.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'V', 'V', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()),
      reinterpret_cast<lapack_complex_double*>(vl.data()), n,
      reinterpret_cast<lapack_complex_double*>(vr.data()), n);
  if (info != 0)
    throw NumericalError("zgeev failed to converge (info=" + std::to_string(info) + ")");
}

// Union-find clustering of the non-null eigenvalues within radius tol.
std::vector<std::vector<Eigen::Index>> cluster_eigenvalues(const CVec& w, double tol,
                                                           Eigen::Index exclude) {
  const Eigen::Index n = w.size();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != exclude) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return w(a).real() < w(b).real(); });
  for (size_t oi = 0; oi < order.size(); ++oi) {
    for (size_t oj = oi + 1; oj < order.size(); ++oj) {
      if (w(order[oj]).real() - w(order[oi]).real() > tol) break;
      if (std::abs(w(order[oi]) - w(order[oj])) <= tol)
        parent[find(order[oi])] = find(order[oj]);
    }
  }
  std::vector<std::vector<Eigen::Index>> clusters;
  std::vector<Eigen::Index> root_slot(n, -1);
  for (Eigen::Index i : order) {
    const Eigen::Index r = find(i);
    if (root_slot[r] < 0) {
      root_slot[r] = static_cast<Eigen::Index>(clusters.size());
      clusters.emplace_back();
    }
    clusters[root_slot[r]].push_back(i);
  }
  return clusters;
}

CMat thin_q(const CMat& cols) {
  Eigen::HouseholderQR<CMat> qr(cols);
  return qr.householderQ() * CMat::Identity(cols.rows(), cols.cols());
}

}  // namespace

bool SpectralDecomposition::has_nontrivial_blocks() const {
  for (const auto& b : blocks)
    if (b.size > 1) return true;
  return false;
}

CMat SpectralDecomposition::reconstruct() const {
  const Eigen::Index n = right.rows();
  CMat blk = CMat::Zero(n, n);
  for (const auto& b : blocks) blk.block(b.offset, b.offset, b.size, b.size) = b.t;
  return right * blk * left.adjoint();
}

SpectralDecomposition eig_biorthonormal(const SuperOperator& liouvillian,
                                        const EigOptions& opts) {
  const CMat& m = liouvillian.matrix;
  if (m.rows() != m.cols()) throw DimensionError("eig_biorthonormal: matrix must be square");
  const Eigen::Index n = m.rows();

  CVec w;
  CMat vl, vr;
  zgeev_both(m, w, vl, vr);

  const double scale = w.cwiseAbs().maxCoeff();
  if (scale == 0.0)
    throw NumericalError("eig_biorthonormal: operator is zero; steady state not unique");

  // The null mode must be unique and spectrally isolated; it never joins a
  // cluster.
  const double ztol = opts.zero_tol_rel * scale;
  Eigen::Index zi_raw = -1;
  int zero_count = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::abs(w(j)) < ztol) {
      zi_raw = j;
      ++zero_count;
    } else if (w(j).real() > ztol) {
      throw NumericalError("eig_biorthonormal: eigenvalue with positive real part " +
                           std::to_string(w(j).real()) + "; not a stable Liouvillian");
    }
  }
  if (zero_count == 0)
    throw NumericalError("eig_biorthonormal: no zero eigenvalue found; no steady state");
  if (zero_count > 1)
    throw NumericalError("eig_biorthonormal: " + std::to_string(zero_count) +
                         " near-zero eigenvalues; steady state not unique");

  // Grow the clustering radius until the global biorthonormality residual is
  // met; near-degenerate modes that zgeev resolved inconsistently end up in
  // one cluster (or one block) after a few rounds.
  double ctol = opts.cluster_tol_rel * scale;
  std::string last_issue;
  for (int attempt = 0; attempt < 6; ++attempt, ctol *= 10.0) {
    const auto clusters = cluster_eigenvalues(w, ctol, zi_raw);

    // Column order: zero mode first, then clusters contiguously.
    std::vector<Eigen::Index> order{zi_raw};
    std::vector<SpectralBlock> blocks;
    blocks.push_back({0, 1, CMat::Constant(1, 1, w(zi_raw))});
    for (const auto& c : clusters) {
      blocks.push_back({static_cast<Eigen::Index>(order.size()),
                        static_cast<Eigen::Index>(c.size()), CMat{}});
      order.insert(order.end(), c.begin(), c.end());
    }

    CMat right(n, n), left(n, n);
    CVec ew(n);
    for (Eigen::Index p = 0; p < n; ++p) {
      right.col(p) = vr.col(order[p]);
      left.col(p) = vl.col(order[p]);
      ew(p) = w(order[p]);
    }

    bool retry = false;
    for (auto& b : blocks) {
      if (b.size == 1) {
        const cxd s = (left.col(b.offset).adjoint() * right.col(b.offset))(0, 0);
        if (std::abs(s) < 1.0 / opts.max_cluster_cond) {
          last_issue = "isolated mode with collapsed left/right overlap";
          retry = true;
          break;
        }
        left.col(b.offset) /= std::conj(s);
        b.t = CMat::Constant(1, 1, ew(b.offset));
        continue;
      }
      // Multi-member cluster.
      if (!opts.allow_blocks) {
        // Oblique Gram-Schmidt on the eigenvectors themselves; defective
        // clusters have a (near-)singular overlap and fail loudly.
        const auto rsub = right.middleCols(b.offset, b.size);
        auto lsub = left.middleCols(b.offset, b.size);
        const CMat overlap = lsub.adjoint() * rsub;
        Eigen::JacobiSVD<CMat> svd(overlap);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        if (smin <= 0.0 || smax / smin > opts.max_cluster_cond)
          throw NumericalError(
              "eig_biorthonormal: eigenvalue cluster of size " + std::to_string(b.size) +
              " is defective to tolerance (overlap condition > " +
              std::to_string(opts.max_cluster_cond) +
              "); enable block handling to decompose this operator");
        lsub = lsub * overlap.inverse().adjoint();
        b.t = CMat(ew.segment(b.offset, b.size).asDiagonal());
        continue;
      }
      // Block mode: orthonormal bases of the cluster's invariant subspaces.
      // The spans stay accurate even when the individual eigenvectors
      // coalesce; pairing happens globally below.
      right.middleCols(b.offset, b.size) = thin_q(right.middleCols(b.offset, b.size));
      left.middleCols(b.offset, b.size) = thin_q(left.middleCols(b.offset, b.size));
    }
    if (retry) continue;

    if (opts.allow_blocks) {
      // Exact global pairing: left <- left (left^dag right)^{-dag}. The gram
      // is near identity after the per-cluster stage, so the inverse is
      // benign unless the clustering is still wrong.
      const CMat gram = left.adjoint() * right;
      const CMat ginv = gram.partialPivLu().inverse();
      if (!(ginv.cwiseAbs().maxCoeff() < opts.max_cluster_cond)) {
        last_issue = "globally ill-conditioned left/right pairing";
        continue;
      }
      left = left * ginv.adjoint();
      for (auto& b : blocks) {
        if (b.size == 1) continue;
        b.t = left.middleCols(b.offset, b.size).adjoint() *
              (m * right.middleCols(b.offset, b.size));
      }
      // Invariant-subspace quality: sampled reconstruction residual.
      const double mnorm = m.norm();
      bool recon_ok = true;
      for (int probe = 0; probe < 3 && recon_ok; ++probe) {
        CVec x = CVec::Zero(n);
        uint64_t state = 0x9E3779B97F4A7C15ull * (probe + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
          state = state * 6364136223846793005ull + 1442695040888963407ull;
          x(i) = cxd{double(int64_t(state >> 33)) / double(1ll << 30) - 1.0,
                     double(int64_t((state * 48271u) >> 33)) / double(1ll << 30) - 1.0};
        }
        CVec lx = left.adjoint() * x;
        CVec tx = CVec::Zero(n);
        for (const auto& b : blocks)
          tx.segment(b.offset, b.size) = b.t * lx.segment(b.offset, b.size);
        const double resid = (m * x - right * tx).norm();
        if (resid > 1e-6 * mnorm * x.norm()) {
          last_issue = "reconstruction residual " + std::to_string(resid / (mnorm * x.norm()));
          recon_ok = false;
        }
      }
      if (!recon_ok) continue;
    } else {
      CMat gram = left.adjoint() * right;
      gram -= CMat::Identity(n, n);
      const double resid = gram.cwiseAbs().maxCoeff();
      if (resid > opts.biortho_tol) {
        last_issue = "biorthonormality residual " + std::to_string(resid);
        continue;
      }
    }

    // Normalize the null pair: unit-trace hermitized state on the right.
    SpectralDecomposition dec;
    CMat rho = unvectorize(CVec(right.col(0)));
    const cxd tr = rho.trace();
    if (std::abs(tr) < 1e-12)
      throw NumericalError("eig_biorthonormal: null vector has (near) zero trace");
    rho = hermitize(rho / tr);
    rho /= rho.trace().real();
    right.col(0) = vectorize(rho);
    left.col(0) *= std::conj(tr);

    dec.eigenvalues = std::move(ew);
    dec.right = std::move(right);
    dec.left = std::move(left);
    dec.blocks = std::move(blocks);
    dec.zero_index = 0;
    dec.steady_state = std::move(rho);
    return dec;
  }
  throw NumericalError(
      "eig_biorthonormal: could not reach biorthonormality tolerance (" + last_issue +
      "); degenerate eigenvalue structure prevents a clean decomposition");
}

CMat steady_state_lu(const SuperOperator& liouvillian) {
  const CMat& m = liouvillian.matrix;
  const Eigen::Index n2 = m.rows();
  const Eigen::Index n = liouvillian.dim;
  if (n2 != m.cols() || n * n != n2)
    throw DimensionError("steady_state_lu: malformed superoperator");

  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const Eigen::RowVectorXcd t = trace_functional(n);
  const CVec vec_id = t.adjoint();

  // Rank-one shift along the trace direction makes the system regular while
  // pinning Tr(rho) = 1 for any trace-preserving input.
  CMat shifted = m + (scale / double(n)) * (vec_id * t);
  Eigen::PartialPivLU<CMat> lu(shifted);
  const CVec b = (scale / double(n)) * vec_id;
  CVec x = lu.solve(b);
  x += lu.solve(b - shifted * x);  // one step of refinement

  const double resid = (m * x).norm();
  const double mnorm = m.norm();
  if (!(resid <= 1e-8 * std::max(mnorm, 1e-300)))
    throw NumericalError(
        "steady_state_lu: residual " + std::to_string(resid) +
        " too large; Liouvillian is not trace-preserving or has a degenerate null space");

  CMat rho = hermitize(unvectorize(x));
  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12)
    throw NumericalError("steady_state_lu: null vector has (near) zero trace");
  return rho / tr;
}

}  // namespace polyspec
