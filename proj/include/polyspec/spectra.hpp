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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyspec/eig.hpp"
#include "polyspec/model.hpp"

namespace polyspec {

enum class Exec { Serial, Parallel };

/// Frequency-domain cumulant spectrum. For order 2 `values` is a column
/// (one entry per omega1 point); for orders 3 and 4 it is the matrix
/// values(i, j) = S(omega1[i], omega2[j]). Frequencies in rad/ns.
struct PolySpectrum {
  int order{2};
  std::vector<double> omega1;
  std::vector<double> omega2;
  CMat values;
  double beta2{0.0};
  bool includes_noise_floor{false};
  std::string note;
};

enum class S4Method { ClosedForm, Quadrature };

struct S4Options {
  S4Method method = S4Method::ClosedForm;
  double pole_tol_rel = 1e-6;  // closed form falls back to quadrature below this
  double quad_rel_tol = 1e-9;
  int quad_depth = 12;
};

/// Evaluates quantum polyspectra of a model from its spectral decomposition.
/// Construction performs the eigendecomposition once; evaluation over
/// frequency grids is pure per point and parallelizes over grid points.
class SpectraEvaluator {
 public:
  /// Decomposes with block handling enabled (defective clusters become
  /// invariant-subspace blocks; all formulas then use block resolvents).
  explicit SpectraEvaluator(const LiouvillianModel& model);
  SpectraEvaluator(const LiouvillianModel& model, SpectralDecomposition dec);
  ~SpectraEvaluator();
  SpectraEvaluator(SpectraEvaluator&&) noexcept = default;

  const SpectralDecomposition& decomposition() const { return dec_; }
  const CMat& rho0() const { return dec_.steady_state; }
  double beta2() const { return beta2_; }
  /// Stationary detector mean <z> = beta^2 Tr(A' rho0)... = beta^2 Tr(A rho0).
  double mean_z() const;

  /// G'(omega) = sum_{j != 0} r_j l_j^dag / (-(lambda_j + i omega)).
  SuperOperator g_prime(double omega) const;

  cxd s2_at(double omega, bool include_floor = true) const;
  cxd s3_at(double omega1, double omega2) const;
  cxd s4_at(double omega1, double omega2, const S4Options& opts = {}) const;

  PolySpectrum s2(std::span<const double> grid, bool include_floor = true,
                  Exec exec = Exec::Parallel) const;
  PolySpectrum s3(std::span<const double> grid1, std::span<const double> grid2,
                  Exec exec = Exec::Parallel) const;
  PolySpectrum s4(std::span<const double> grid1, std::span<const double> grid2,
                  const S4Options& opts = {}, Exec exec = Exec::Parallel) const;

  /// Number of grid points the last s4 call pushed to the quadrature fallback.
  long s4_fallback_count() const { return fallback_count_; }

 private:
  struct BlockTable;

  void build_tables(const LiouvillianModel& model);
  /// y = (-(L_restricted + i omega))^{-1} x blockwise over the non-null modes.
  CVec resolvent_apply(const CVec& x, double omega) const;
  CVec resolvent_apply_transpose(const CVec& x, double omega) const;
  cxd pair_pole_sum(const CVec& xl, const CVec& xr, const CVec& yl, const CVec& yr,
                    double s, double pole_tol, bool& pole_hit) const;
  cxd s4_point_closed(double w1, double w2, const S4Options& opts, bool& fell_back) const;
  cxd s4_point_quadrature(double w1, double w2, const S4Options& opts) const;

  SpectralDecomposition dec_;
  double beta2_{0.0};
  cxd mean_{0.0};       // Tr(A rho0) symmetrized
  CVec lam_;            // non-null eigenvalues (K), column order of the blocks
  CVec u_, v_, c_;      // trace-side, state-side coefficients; c = u.*v
  CMat bmat_;           // K x K: l^dag A' r between propagators
  std::unique_ptr<BlockTable> btab_;
  mutable long fallback_count_{0};
};

/// Fast steady state (LU path, no eigendecomposition).
CMat steady_state(const LiouvillianModel& model);

/// Multi-time moment <z(t_n)...z(t_1)> = beta^{2n} Tr(A G(t_n - t_{n-1}) ... A rho0)
/// computed with matrix exponentials; slow reference path for 1 <= n <= 4,
/// times strictly increasing.
cxd moments_oracle(const LiouvillianModel& model, std::span<const double> times);

}  // namespace polyspec
