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

#include "polyspec/spectra.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace polyspec {

namespace {

template <typename Body>
void run_grid(Eigen::Index n, Exec exec, const Body& body) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < n; ++i) body(i);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) body(i);
  }
}

// Per-point cache of resolvent-applied vectors keyed by (slot, omega).
class VecCache {
 public:
  template <typename Make>
  const CVec& get(int slot, double omega, Make&& make) {
    for (auto& e : entries_)
      if (e.slot == slot && e.omega == omega) return e.v;
    entries_.push_back({slot, omega, make()});
    return entries_.back().v;
  }

 private:
  struct Entry {
    int slot;
    double omega;
    CVec v;
  };
  std::vector<Entry> entries_;
};

}  // namespace

// Block structure over the non-null columns; scalar columns use the plain
// eigenvalue resolvent, cluster blocks a small linear solve.
struct SpectraEvaluator::BlockTable {
  struct Blk {
    Eigen::Index off, size;
    CMat t;
  };
  std::vector<Blk> blocks;  // only size > 1
  std::vector<char> scalar_mask;

  CVec apply(const CVec& lam, const CVec& x, double omega, bool transpose) const {
    CVec y = (-(lam.array() + cxd{0.0, omega})).inverse() * x.array();
    for (const auto& b : blocks) {
      CMat m = -b.t;
      if (transpose) m.transposeInPlace();
      m.diagonal().array() -= cxd{0.0, omega};
      y.segment(b.off, b.size) = m.partialPivLu().solve(CVec(x.segment(b.off, b.size)));
    }
    return y;
  }
};

SpectraEvaluator::SpectraEvaluator(const LiouvillianModel& model)
    : SpectraEvaluator(model, eig_biorthonormal(model.liouvillian,
                                                EigOptions{.allow_blocks = true})) {}

SpectraEvaluator::SpectraEvaluator(const LiouvillianModel& model, SpectralDecomposition dec)
    : dec_(std::move(dec)), beta2_(model.beta2) {
  build_tables(model);
}

SpectraEvaluator::~SpectraEvaluator() = default;

void SpectraEvaluator::build_tables(const LiouvillianModel& model) {
  const Eigen::Index n2 = dec_.right.rows();
  const Eigen::Index k = n2 - 1;
  const Eigen::Index zi = dec_.zero_index;
  if (zi != 0)
    throw NumericalError("SpectraEvaluator: decomposition must order the null mode first");

  const CMat& rho0 = dec_.steady_state;
  mean_ = 0.5 * (model.measurement_op * rho0 + rho0 * model.measurement_op.adjoint()).trace();

  CMat asup = measurement_superop(model.measurement_op).matrix;
  asup -= mean_ * CMat::Identity(n2, n2);  // A' = A - Tr(A rho0)

  const Eigen::RowVectorXcd trow = trace_functional(dec_.dim()) * asup;
  const Eigen::RowVectorXcd u_full = trow * dec_.right;
  const CVec a0 = asup * dec_.right.col(zi);  // A' vec(rho0)
  const CVec v_full = dec_.left.adjoint() * a0;
  const CMat g_full = dec_.left.adjoint() * (asup * dec_.right);

  lam_ = dec_.eigenvalues.segment(1, k);
  u_ = u_full.segment(1, k).transpose();
  v_ = v_full.segment(1, k);
  bmat_ = g_full.block(1, 1, k, k);
  c_ = u_.array() * v_.array();

  btab_ = std::make_unique<BlockTable>();
  btab_->scalar_mask.assign(k, 1);
  for (const auto& b : dec_.blocks) {
    if (b.offset == zi) continue;
    if (b.size == 1) continue;
    btab_->blocks.push_back({b.offset - 1, b.size, b.t});
    for (Eigen::Index i = 0; i < b.size; ++i) btab_->scalar_mask[b.offset - 1 + i] = 0;
  }
}

double SpectraEvaluator::mean_z() const { return beta2_ * mean_.real(); }

CVec SpectraEvaluator::resolvent_apply(const CVec& x, double omega) const {
  return btab_->apply(lam_, x, omega, false);
}

CVec SpectraEvaluator::resolvent_apply_transpose(const CVec& x, double omega) const {
  return btab_->apply(lam_, x, omega, true);
}

SuperOperator SpectraEvaluator::g_prime(double omega) const {
  const Eigen::Index n2 = dec_.right.rows();
  const Eigen::Index k = n2 - 1;
  CMat mid = CMat::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    if (btab_->scalar_mask[i]) mid(i, i) = -1.0 / (lam_(i) + cxd{0.0, omega});
  for (const auto& b : btab_->blocks) {
    CMat m = -b.t;
    m.diagonal().array() -= cxd{0.0, omega};
    mid.block(b.off, b.off, b.size, b.size) = m.inverse();
  }
  return {dec_.dim(), dec_.right.rightCols(k) * mid * dec_.left.rightCols(k).adjoint()};
}

cxd SpectraEvaluator::s2_at(double omega, bool include_floor) const {
  const CVec yp = resolvent_apply(v_, omega);
  const CVec ym = resolvent_apply(v_, -omega);
  cxd val = (u_.array() * (yp.array() + ym.array())).sum();
  val *= beta2_ * beta2_;
  if (include_floor) val += beta2_ / 4.0;
  return val;
}

cxd SpectraEvaluator::s3_at(double omega1, double omega2) const {
  // Canonical argument order makes the permutation symmetry exact in
  // floating point.
  if (omega2 < omega1) std::swap(omega1, omega2);
  const std::array<double, 3> ww{omega1, omega2, -omega1 - omega2};
  VecCache cache;

  // Sum over permutations (k,l,m) of Tr[A' G'(w_m) A' G'(w_m + w_l) A' rho0];
  // w_m + w_l = -w_k. Group by the second argument to share the
  // matrix-vector product.
  cxd total{0.0, 0.0};
  for (int kk = 0; kk < 3; ++kk) {
    const CVec rhs =
        bmat_ * cache.get(0, -ww[kk], [&] { return resolvent_apply(v_, -ww[kk]); });
    for (int mm = 0; mm < 3; ++mm) {
      if (mm == kk) continue;
      const CVec& ua =
          cache.get(1, ww[mm], [&] { return resolvent_apply_transpose(u_, ww[mm]); });
      total += (ua.array() * rhs.array()).sum();
    }
  }
  return total * std::pow(beta2_, 3);
}

// (1/2pi) Int f_C(s - w) g_D(w) dw over block pairs:
//   sum_CD (xl_C kron yl_D)^T [-(T_C \oplus T_D + i s)]^{-1} (xr_C kron yr_D),
// the partial-fraction formula -1/(lam_i + lam_j + i s) generalized to
// invariant-subspace blocks.
cxd SpectraEvaluator::pair_pole_sum(const CVec& xl, const CVec& xr, const CVec& yl,
                                    const CVec& yr, double s, double pole_tol,
                                    bool& pole_hit) const {
  const Eigen::Index k = lam_.size();
  const auto& mask = btab_->scalar_mask;
  const CVec a = xl.array() * xr.array();
  const CVec b = yl.array() * yr.array();

  cxd total{0.0, 0.0};
  // scalar x scalar bulk
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!mask[j]) continue;
    const cxd base = lam_(j) + cxd{0.0, s};
    cxd acc{0.0, 0.0};
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!mask[i]) continue;
      const cxd den = base + lam_(i);
      if (std::abs(den) < pole_tol) pole_hit = true;
      acc += a(i) / den;
    }
    total -= acc * b(j);
  }
  // scalar x block and block x scalar
  for (const auto& blk : btab_->blocks) {
    for (Eigen::Index i = 0; i < blk.size; ++i)
      for (Eigen::Index j = 0; j < blk.size; ++j)
        if (std::abs(lam_(blk.off + i) + lam_(blk.off + j) + cxd{0.0, s}) < pole_tol)
          pole_hit = true;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!mask[j]) continue;
      const cxd shift = lam_(j) + cxd{0.0, s};
      if (std::abs(shift + lam_(blk.off)) < pole_tol) pole_hit = true;
      CMat m = -blk.t;
      m.diagonal().array() -= shift;
      // block as the C (left) factor, scalar j as D
      const CVec sol = m.partialPivLu().solve(CVec(xr.segment(blk.off, blk.size)));
      total += b(j) * (xl.segment(blk.off, blk.size).transpose() * sol)(0, 0);
      // scalar j as C, block as D
      const CVec sol2 = m.partialPivLu().solve(CVec(yr.segment(blk.off, blk.size)));
      total += a(j) * (yl.segment(blk.off, blk.size).transpose() * sol2)(0, 0);
    }
  }
  // block x block
  for (const auto& bc : btab_->blocks) {
    for (const auto& bd : btab_->blocks) {
      CMat ksum = kron(bc.t, CMat::Identity(bd.size, bd.size)) +
                  kron(CMat::Identity(bc.size, bc.size), bd.t);
      ksum = -ksum;
      ksum.diagonal().array() -= cxd{0.0, s};
      CVec rhs(bc.size * bd.size), lft(bc.size * bd.size);
      for (Eigen::Index i = 0; i < bc.size; ++i)
        for (Eigen::Index j = 0; j < bd.size; ++j) {
          rhs(i * bd.size + j) = xr(bc.off + i) * yr(bd.off + j);
          lft(i * bd.size + j) = xl(bc.off + i) * yl(bd.off + j);
        }
      const CVec sol = ksum.partialPivLu().solve(rhs);
      total += (lft.transpose() * sol)(0, 0);
    }
  }
  return total;
}

cxd SpectraEvaluator::s4_point_closed(double w1, double w2, const S4Options& opts,
                                      bool& fell_back) const {
  const std::array<double, 4> ww{w1, w2, -w1, -w2};
  const double scale = lam_.cwiseAbs().maxCoeff();
  const double pole_tol = opts.pole_tol_rel * scale;
  VecCache cache;

  auto ru = [&](double w) -> const CVec& {
    return cache.get(0, w, [&] { return resolvent_apply_transpose(u_, w); });
  };
  auto rv = [&](double w) -> const CVec& {
    return cache.get(1, w, [&] { return resolvent_apply(v_, w); });
  };
  auto wvec = [&](double g) -> const CVec& {
    return cache.get(2, g, [&] { return CVec(bmat_ * rv(g)); });
  };

  std::vector<std::tuple<double, double, CVec>> ycache, x2cache;
  auto yvec = [&](double s, double g) -> const CVec& {
    for (auto& e : ycache)
      if (std::get<0>(e) == s && std::get<1>(e) == g) return std::get<2>(e);
    ycache.emplace_back(s, g, CVec(bmat_ * resolvent_apply(wvec(g), s)));
    return std::get<2>(ycache.back());
  };
  auto x2vec = [&](double a, double g) -> const CVec& {
    for (auto& e : x2cache)
      if (std::get<0>(e) == a && std::get<1>(e) == g) return std::get<2>(e);
    x2cache.emplace_back(a, g, resolvent_apply_transpose(ru(a), g));
    return std::get<2>(x2cache.back());
  };

  bool pole_hit = false;
  cxd total{0.0, 0.0};
  std::array<int, 4> perm{0, 1, 2, 3};
  do {
    const int ll = perm[1], mm = perm[2], nn = perm[3];
    const double alpha = ww[nn];
    const double s = ww[mm] + ww[nn];
    const double gamma = ww[ll] + s;  // = -ww[perm[0]]

    const cxd term1 = (ru(alpha).array() * yvec(s, gamma).array()).sum();
    const cxd i1 = pair_pole_sum(ru(alpha), v_, u_, rv(gamma), s, pole_tol, pole_hit);
    const cxd i2 = pair_pole_sum(x2vec(alpha, gamma), v_, u_, v_, s, pole_tol, pole_hit);
    total += term1 - i1 - i2;
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (pole_hit && opts.method == S4Method::ClosedForm) {
    fell_back = true;
    return s4_point_quadrature(w1, w2, opts);
  }
  return total * std::pow(beta2_, 4);
}

cxd SpectraEvaluator::s4_point_quadrature(double w1, double w2, const S4Options& opts) const {
  using boost::math::quadrature::gauss_kronrod;
  const std::array<double, 4> ww{w1, w2, -w1, -w2};
  VecCache cache;
  auto ru = [&](double w) -> const CVec& {
    return cache.get(0, w, [&] { return resolvent_apply_transpose(u_, w); });
  };
  auto rv = [&](double w) -> const CVec& {
    return cache.get(1, w, [&] { return resolvent_apply(v_, w); });
  };

  auto integrate_cx = [&](auto&& f) {
    const auto re = gauss_kronrod<double, 31>::integrate(
        [&](double w) { return f(w).real(); }, -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), opts.quad_depth, opts.quad_rel_tol);
    const auto im = gauss_kronrod<double, 31>::integrate(
        [&](double w) { return f(w).imag(); }, -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), opts.quad_depth, opts.quad_rel_tol);
    return cxd{re, im} / (2.0 * M_PI);
  };

  cxd total{0.0, 0.0};
  std::array<int, 4> perm{0, 1, 2, 3};
  do {
    const int ll = perm[1], mm = perm[2], nn = perm[3];
    const double alpha = ww[nn];
    const double s = ww[mm] + ww[nn];
    const double gamma = ww[ll] + s;

    const CVec y = bmat_ * resolvent_apply(rv(gamma), s);
    const cxd term1 = (ru(alpha).array() * y.array()).sum();

    const CVec& xa = ru(alpha);
    const CVec x2 = resolvent_apply_transpose(xa, gamma);
    const CVec& yg = rv(gamma);

    // Tr[A'G'(alpha) G'(s - w) A' rho0] * Tr[A'G'(w) G'(gamma) A' rho0]
    const cxd i1 = integrate_cx([&](double w) {
      const cxd ta = (xa.array() * resolvent_apply(v_, s - w).array()).sum();
      const cxd tb = (u_.array() * resolvent_apply(yg, w).array()).sum();
      return ta * tb;
    });

    // Tr[A'G'(alpha) G'(gamma) G'(s - w) A' rho0] * Tr[A'G'(w) A' rho0]
    const cxd i2 = integrate_cx([&](double w) {
      const cxd ta = (x2.array() * resolvent_apply(v_, s - w).array()).sum();
      const cxd tb = (u_.array() * resolvent_apply(v_, w).array()).sum();
      return ta * tb;
    });

    total += term1 - i1 - i2;
  } while (std::next_permutation(perm.begin(), perm.end()));

  return total * std::pow(beta2_, 4);
}

cxd SpectraEvaluator::s4_at(double omega1, double omega2, const S4Options& opts) const {
  // The cut S4(w1, w2, -w1) depends only on the multiset {+-w1, +-w2}.
  double a = std::abs(omega1), b = std::abs(omega2);
  if (b < a) std::swap(a, b);
  if (opts.method == S4Method::Quadrature) return s4_point_quadrature(a, b, opts);
  bool fell_back = false;
  const cxd val = s4_point_closed(a, b, opts, fell_back);
  if (fell_back) {
#pragma omp atomic
    ++fallback_count_;
  }
  return val;
}

PolySpectrum SpectraEvaluator::s2(std::span<const double> grid, bool include_floor,
                                  Exec exec) const {
  PolySpectrum ps;
  ps.order = 2;
  ps.omega1.assign(grid.begin(), grid.end());
  ps.beta2 = beta2_;
  ps.includes_noise_floor = include_floor;
  ps.values.resize(static_cast<Eigen::Index>(grid.size()), 1);
  run_grid(static_cast<Eigen::Index>(grid.size()), exec,
           [&](Eigen::Index i) { ps.values(i, 0) = s2_at(grid[i], include_floor); });
  return ps;
}

PolySpectrum SpectraEvaluator::s3(std::span<const double> grid1,
                                  std::span<const double> grid2, Exec exec) const {
  PolySpectrum ps;
  ps.order = 3;
  ps.omega1.assign(grid1.begin(), grid1.end());
  ps.omega2.assign(grid2.begin(), grid2.end());
  ps.beta2 = beta2_;
  const Eigen::Index n1 = ps.omega1.size(), n2g = ps.omega2.size();
  ps.values.resize(n1, n2g);

  const bool same = ps.omega1 == ps.omega2;
  if (same) {
    // S3(w1,w2) = S3(w2,w1): evaluate the upper triangle, mirror the rest.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> tasks;
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = i; j < n2g; ++j) tasks.emplace_back(i, j);
    run_grid(static_cast<Eigen::Index>(tasks.size()), exec, [&](Eigen::Index t) {
      const auto [i, j] = tasks[t];
      ps.values(i, j) = s3_at(ps.omega1[i], ps.omega2[j]);
    });
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = 0; j < i; ++j) ps.values(i, j) = ps.values(j, i);
  } else {
    run_grid(n1 * n2g, exec, [&](Eigen::Index t) {
      const Eigen::Index i = t / n2g, j = t % n2g;
      ps.values(i, j) = s3_at(ps.omega1[i], ps.omega2[j]);
    });
  }
  return ps;
}

PolySpectrum SpectraEvaluator::s4(std::span<const double> grid1,
                                  std::span<const double> grid2, const S4Options& opts,
                                  Exec exec) const {
  PolySpectrum ps;
  ps.order = 4;
  ps.omega1.assign(grid1.begin(), grid1.end());
  ps.omega2.assign(grid2.begin(), grid2.end());
  ps.beta2 = beta2_;
  const Eigen::Index n1 = ps.omega1.size(), n2g = ps.omega2.size();
  ps.values.resize(n1, n2g);
  fallback_count_ = 0;

  const bool same = ps.omega1 == ps.omega2;
  if (same) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> tasks;
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = i; j < n2g; ++j) tasks.emplace_back(i, j);
    run_grid(static_cast<Eigen::Index>(tasks.size()), exec, [&](Eigen::Index t) {
      const auto [i, j] = tasks[t];
      ps.values(i, j) = s4_at(ps.omega1[i], ps.omega2[j], opts);
    });
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = 0; j < i; ++j) ps.values(i, j) = ps.values(j, i);
  } else {
    run_grid(n1 * n2g, exec, [&](Eigen::Index t) {
      const Eigen::Index i = t / n2g, j = t % n2g;
      ps.values(i, j) = s4_at(ps.omega1[i], ps.omega2[j], opts);
    });
  }
  if (fallback_count_ > 0) {
    ps.note = "s4: " + std::to_string(fallback_count_) +
              " grid points used the quadrature fallback (near-coincident poles)";
    std::fprintf(stderr, "warning: %s\n", ps.note.c_str());
  }
  return ps;
}

CMat steady_state(const LiouvillianModel& model) {
  return steady_state_lu(model.liouvillian);
}

cxd moments_oracle(const LiouvillianModel& model, std::span<const double> times) {
  const size_t n = times.size();
  if (n < 1 || n > 4)
    throw DimensionError("moments_oracle: supported orders are 1 <= n <= 4");
  for (size_t i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1]))
      throw DimensionError("moments_oracle: times must be strictly increasing");

  const CMat rho0 = steady_state(model);
  const CMat asup = measurement_superop(model.measurement_op).matrix;
  CVec x = asup * vectorize(rho0);
  for (size_t i = 1; i < n; ++i) {
    x = expm(model.liouvillian.matrix, times[i] - times[i - 1]) * x;
    x = asup * x;
  }
  const cxd tr = trace_functional(model.dim()) * x;
  return std::pow(model.beta2, static_cast<double>(n)) * tr;
}

}  // namespace polyspec
