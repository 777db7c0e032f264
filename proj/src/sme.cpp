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

#include "polyspec/sme.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "polyspec/eig.hpp"
#include "polyspec/spectra.hpp"

namespace polyspec {

namespace {

using SpMat = Eigen::SparseMatrix<cxd>;

SpMat sparsify(const CMat& m) {
  SpMat s = m.sparseView(1.0, 1e-300);
  s.makeCompressed();
  return s;
}

double hamiltonian_scale(const CMat& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Shared integration core. Emits block-averaged z and per-block observables.
class Integrator {
 public:
  Integrator(const LiouvillianModel& model, const SimConfig& cfg)
      : model_(model),
        cfg_(cfg),
        lmat_(sparsify(model.liouvillian.matrix)),
        a_(sparsify(model.measurement_op)),
        adag_(sparsify(model.measurement_op.adjoint().eval())),
        asum_(model.measurement_op + model.measurement_op.adjoint()),
        beta_(model.beta()) {
    for (const auto& label : cfg.record_observables) {
      auto it = model.observables.find(label);
      if (it == model.observables.end())
        throw ConfigError("simulate: unknown observable '" + label + "'");
      obs_ops_.emplace_back(label, it->second);
    }
  }

  Trajectory run(const CMat& rho_init, uint64_t stream) {
    const double dt = cfg_.dt;
    const long n_steps = static_cast<long>(std::llround(cfg_.duration / dt));
    const int decim = cfg_.emit_decimation;
    const long n_emit = n_steps / decim;
    const double sqrt_dt = std::sqrt(dt);
    const CounterRng rng(cfg_.seed, stream);

    Trajectory traj;
    traj.dt = dt * decim;
    traj.seed = cfg_.seed;
    traj.model_fingerprint = model_.fingerprint();
    traj.z.resize(n_emit);
    for (const auto& [label, op] : obs_ops_) traj.observables[label].resize(n_emit);

    const Eigen::Index n = model_.dim();
    CMat rho = rho_init;
    CVec vrho(n * n);
    double zacc = 0.0;

    for (long k = 0; k < n_steps; ++k) {
      if (k % decim == 0) {
        long e = k / decim;
        for (size_t o = 0; o < obs_ops_.size(); ++o)
          traj.observables[obs_ops_[o].first][e] = (obs_ops_[o].second * rho).trace().real();
      }

      const double xi = rng.normal(static_cast<uint64_t>(k));
      const double dw = sqrt_dt * xi;
      const double az = 0.5 * (asum_ * rho).trace().real();
      zacc += beta_ * beta_ * az + beta_ * xi / (2.0 * sqrt_dt);

      vrho = Eigen::Map<const CVec>(rho.data(), n * n);
      CVec drift = lmat_ * vrho;
      CMat srho = a_ * rho;
      srho += rho * CMat(adag_);
      srho -= (2.0 * az) * rho;
      rho += dt * Eigen::Map<const CMat>(drift.data(), n, n) + (beta_ * dw) * srho;

      rho = 0.5 * (rho + rho.adjoint().eval());
      const double tr = rho.trace().real();
      if (!(std::abs(tr) > 1e-6) || !std::isfinite(tr))
        throw NumericalError("simulate: trace collapsed to " + std::to_string(tr) +
                             " at step " + std::to_string(k) + " (t=" +
                             std::to_string(k * dt) + " ns); integration unstable");
      if (cfg_.renormalize) rho /= tr;

      if (cfg_.positivity_check_interval > 0 && k % cfg_.positivity_check_interval == 0) {
        Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
        const double emin = es.eigenvalues().minCoeff();
        if (emin < -1e-3)
          throw NumericalError("simulate: state eigenvalue " + std::to_string(emin) +
                               " below -1e-3 at step " + std::to_string(k) +
                               "; reduce dt");
      }

      if ((k + 1) % decim == 0) {
        traj.z[k / decim] = zacc / decim;
        zacc = 0.0;
      }
    }
    return traj;
  }

 private:
  const LiouvillianModel& model_;
  const SimConfig& cfg_;
  SpMat lmat_, a_, adag_;
  CMat asum_;
  double beta_;
  std::vector<std::pair<std::string, CMat>> obs_ops_;
};

}  // namespace

void SimConfig::validate(const LiouvillianModel& model) const {
  if (!(dt > 0)) throw ConfigError("SimConfig: dt must be positive");
  if (!(duration >= dt)) throw ConfigError("SimConfig: duration shorter than dt");
  if (emit_decimation < 1) throw ConfigError("SimConfig: emit_decimation must be >= 1");
  const long n_steps = static_cast<long>(std::llround(duration / dt));
  if (n_steps % emit_decimation != 0)
    throw ConfigError("SimConfig: step count not divisible by emit_decimation");

  double rate_scale = hamiltonian_scale(model.hamiltonian);
  for (const auto& j : model.jumps) rate_scale = std::max(rate_scale, j.rate);
  if (dt * rate_scale > 0.05)
    throw ConfigError("SimConfig: dt too coarse, dt * max(rates, |omega|) = " +
                      std::to_string(dt * rate_scale) + " > 0.05");
  const double dtb = dt * model.beta2;
  if (dtb > 0.05 && !allow_strong_measurement_steps)
    throw ConfigError("SimConfig: dt * beta^2 = " + std::to_string(dtb) +
                      " > 0.05; set allow_strong_measurement_steps for collapse-regime runs");
  if (dtb > 1.0)
    throw ConfigError("SimConfig: dt * beta^2 = " + std::to_string(dtb) + " > 1");
}

CMat sme_step(const LiouvillianModel& model, const CMat& rho, double dt, double dw) {
  if (rho.rows() != model.dim() || rho.cols() != model.dim())
    throw DimensionError("sme_step: state dimension mismatch");
  const CMat& a = model.measurement_op;
  const cxd az = ((a + a.adjoint()) * rho).trace();
  CMat next = rho + dt * model.liouvillian.apply(rho) +
              (model.beta() * dw) * (a * rho + rho * a.adjoint() - az * rho);
  next = hermitize(next);
  const double tr = next.trace().real();
  if (!(std::abs(tr) > 1e-6) || !std::isfinite(tr))
    throw NumericalError("sme_step: trace collapsed to " + std::to_string(tr));
  return next / tr;
}

Trajectory simulate(const LiouvillianModel& model, const SimConfig& cfg) {
  return simulate(model, cfg, steady_state(model));
}

Trajectory simulate(const LiouvillianModel& model, const SimConfig& cfg,
                    const CMat& rho_init) {
  return simulate_stream(model, cfg, rho_init, 0);
}

Trajectory simulate_stream(const LiouvillianModel& model, const SimConfig& cfg,
                           const CMat& rho_init, uint64_t stream) {
  cfg.validate(model);
  Integrator integ(model, cfg);
  return integ.run(rho_init, stream);
}

std::vector<Trajectory> spawn_ensemble(const LiouvillianModel& model, const SimConfig& cfg,
                                       int n_traj) {
  cfg.validate(model);
  const CMat rho0 = steady_state(model);
  std::vector<Trajectory> out(n_traj);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_traj; ++i) {
    try {
      Integrator integ(model, cfg);
      out[i] = integ.run(rho0, static_cast<uint64_t>(i));
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace polyspec
