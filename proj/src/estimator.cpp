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

#include "polyspec/estimator.hpp"

#include <algorithm>
#include <unordered_map>

#include <fftw3.h>

namespace polyspec {

namespace {

struct SegmentSpectra {
  // zf(s, col) = z_s(+omega) for the bin held in `bins[col]`; z_s(-omega) is
  // the complex conjugate.
  Eigen::MatrixXcd zf;
  std::vector<Eigen::Index> bins;           // FFT bin index q per column
  std::unordered_map<Eigen::Index, Eigen::Index> col_of_bin;
  double dt{0.0};
  Eigen::Index seg_len{0};
  double w2{0.0}, w3{0.0}, w4{0.0};  // dt * sum(w^n)
  Eigen::Index m() const { return zf.rows(); }
  double omega(Eigen::Index q) const { return 2.0 * M_PI * double(q) / (double(seg_len) * dt); }
};

std::vector<double> make_window(Window w, Eigen::Index p) {
  std::vector<double> win(p, 1.0);
  if (w == Window::Hann)
    for (Eigen::Index k = 0; k < p; ++k)
      win[k] = 0.5 * (1.0 - std::cos(2.0 * M_PI * double(k) / double(p)));
  return win;
}

// Windowed FFTs of all segments, restricted to the requested bins.
SegmentSpectra segment_ffts(std::span<const Trajectory> traces, const EstimatorConfig& cfg,
                            std::vector<Eigen::Index> bins) {
  cfg.validate();
  if (traces.empty()) throw ConfigError("estimator: no traces given");
  const double dt = traces[0].dt;
  for (const auto& t : traces)
    if (t.dt != dt) throw ConfigError("estimator: traces disagree on dt");

  const Eigen::Index p = cfg.segment_length;
  const Eigen::Index hop =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(p * (1.0 - cfg.overlap))));

  std::vector<std::pair<const Trajectory*, Eigen::Index>> starts;
  for (const auto& t : traces)
    for (Eigen::Index s = 0; s + p <= static_cast<Eigen::Index>(t.z.size()); s += hop)
      starts.emplace_back(&t, s);
  const Eigen::Index m = static_cast<Eigen::Index>(starts.size());
  if (m < 8) throw ConfigError("estimator: need at least 8 segments, got " + std::to_string(m));

  const auto win = make_window(cfg.window, p);
  SegmentSpectra out;
  out.dt = dt;
  out.seg_len = p;
  for (double w : win) {
    out.w2 += w * w;
    out.w3 += w * w * w;
    out.w4 += w * w * w * w;
  }
  out.w2 *= dt;
  out.w3 *= dt;
  out.w4 *= dt;

  std::sort(bins.begin(), bins.end());
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
  out.bins = std::move(bins);
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(out.bins.size()); ++c)
    out.col_of_bin[out.bins[c]] = c;
  out.zf.resize(m, static_cast<Eigen::Index>(out.bins.size()));

  // One plan reused across threads via the new-array interface.
  std::vector<double> proto_in(p, 0.0);
  std::vector<fftw_complex> proto_out(p / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(p), proto_in.data(),
                                        proto_out.data(), FFTW_ESTIMATE);

#pragma omp parallel
  {
    std::vector<double> in(p);
    std::vector<fftw_complex> fout(p / 2 + 1);
#pragma omp for schedule(static)
    for (Eigen::Index s = 0; s < m; ++s) {
      const auto& [tr, off] = starts[s];
      double mean = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) mean += tr->z[off + k];
      mean /= double(p);
      for (Eigen::Index k = 0; k < p; ++k) in[k] = (tr->z[off + k] - mean) * win[k];
      fftw_execute_dft_r2c(plan, in.data(), fout.data());
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(out.bins.size()); ++c) {
        const Eigen::Index q = out.bins[c];
        // Convention z(omega) = int z(t) e^{+i omega t} dt: the FFTW forward
        // transform carries e^{-i...}, so the positive-frequency value is the
        // conjugate, times dt.
        out.zf(s, c) = dt * std::conj(cxd{fout[q][0], fout[q][1]});
      }
    }
  }
  fftw_destroy_plan(plan);
  return out;
}

// k-statistics (unbiased joint cumulants) over the segment ensemble, with an
// optional excluded segment for jackknifing. Complex, bilinear in the inputs.
cxd kstat2(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y, Eigen::Index skip) {
  const Eigen::Index m0 = x.size();
  const double m = skip >= 0 ? double(m0 - 1) : double(m0);
  cxd mx{}, my{};
  for (Eigen::Index s = 0; s < m0; ++s) {
    if (s == skip) continue;
    mx += x(s);
    my += y(s);
  }
  mx /= m;
  my /= m;
  cxd sxy{};
  for (Eigen::Index s = 0; s < m0; ++s) {
    if (s == skip) continue;
    sxy += (x(s) - mx) * (y(s) - my);
  }
  return sxy / (m - 1.0);
}

cxd kstat3(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y, const Eigen::VectorXcd& z,
           Eigen::Index skip) {
  const Eigen::Index m0 = x.size();
  const double m = skip >= 0 ? double(m0 - 1) : double(m0);
  cxd mx{}, my{}, mz{};
  for (Eigen::Index s = 0; s < m0; ++s) {
    if (s == skip) continue;
    mx += x(s);
    my += y(s);
    mz += z(s);
  }
  mx /= m;
  my /= m;
  mz /= m;
  cxd sxyz{};
  for (Eigen::Index s = 0; s < m0; ++s) {
    if (s == skip) continue;
    sxyz += (x(s) - mx) * (y(s) - my) * (z(s) - mz);
  }
  return sxyz * m / ((m - 1.0) * (m - 2.0));
}

cxd kstat4(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Eigen::VectorXcd& c,
           const Eigen::VectorXcd& d, Eigen::Index skip) {
  const Eigen::Index m0 = a.size();
  const double m = skip >= 0 ? double(m0 - 1) : double(m0);
  cxd ma{}, mb{}, mc{}, md{};
  for (Eigen::Index s = 0; s < m0; ++s) {
    if (s == skip) continue;
    ma += a(s);
    mb += b(s);
    mc += c(s);
    md += d(s);
  }
  ma /= m;
  mb /= m;
  mc /= m;
  md /= m;
  cxd sabcd{}, sab{}, scd{}, sac{}, sbd{}, sad{}, sbc{};
  for (Eigen::Index s = 0; s < m0; ++s) {
    if (s == skip) continue;
    const cxd xa = a(s) - ma, xb = b(s) - mb, xc = c(s) - mc, xd = d(s) - md;
    sabcd += xa * xb * xc * xd;
    sab += xa * xb;
    scd += xc * xd;
    sac += xa * xc;
    sbd += xb * xd;
    sad += xa * xd;
    sbc += xb * xc;
  }
  return (m * (m + 1.0) * sabcd - (m - 1.0) * (sab * scd + sac * sbd + sad * sbc)) /
         ((m - 1.0) * (m - 2.0) * (m - 3.0));
}

// Jackknife 1-sigma from leave-one-out estimates.
template <typename PointEstimator>
double jackknife_sigma(Eigen::Index m, const PointEstimator& est) {
  cxd mean{};
  std::vector<cxd> loo(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    loo[s] = est(s);
    mean += loo[s];
  }
  mean /= double(m);
  double acc = 0.0;
  for (Eigen::Index s = 0; s < m; ++s) acc += std::norm(loo[s] - mean);
  return std::sqrt(acc * double(m - 1) / double(m));
}

Eigen::Index default_axis_bin_cap(Eigen::Index p, int order) {
  return order == 3 ? p / 4 : p / 2;
}

std::vector<Eigen::Index> axis_bins(const EstimatorConfig& cfg, double dt, int order) {
  const Eigen::Index p = cfg.segment_length;
  Eigen::Index qmax = default_axis_bin_cap(p, order);
  if (cfg.max_frequency > 0) {
    const Eigen::Index quser = static_cast<Eigen::Index>(
        std::floor(cfg.max_frequency * double(p) * dt / (2.0 * M_PI)));
    if (order == 3 && quser > p / 4)
      throw ConfigError("estimator: S3 grid above Nyquist/2 is not representable");
    if (quser > p / 2)
      throw ConfigError("estimator: grid above Nyquist is not representable");
    qmax = std::min(qmax, quser);
  }
  std::vector<Eigen::Index> bins;
  for (Eigen::Index q = cfg.grid_decimation; q <= qmax; q += cfg.grid_decimation)
    bins.push_back(q);
  if (bins.empty()) throw ConfigError("estimator: empty frequency grid");
  return bins;
}

}  // namespace

void EstimatorConfig::validate() const {
  if (segment_length < 64)
    throw ConfigError("EstimatorConfig: segment_length must be >= 64");
  if (overlap < 0.0 || overlap > 0.75)
    throw ConfigError("EstimatorConfig: overlap must be in [0, 0.75]");
  if (grid_decimation < 1)
    throw ConfigError("EstimatorConfig: grid_decimation must be >= 1");
}

EstimatedSpectrum estimate_s2(std::span<const Trajectory> traces, const EstimatorConfig& cfg) {
  const auto bins = axis_bins(cfg, traces.empty() ? 1.0 : traces[0].dt, 2);
  const auto seg = segment_ffts(traces, cfg, bins);
  const Eigen::Index n = static_cast<Eigen::Index>(bins.size());

  EstimatedSpectrum out;
  out.segments = seg.m();
  out.spectrum.order = 2;
  out.spectrum.beta2 = 0.0;
  out.spectrum.includes_noise_floor = true;  // detector noise is part of the trace
  out.spectrum.omega1.resize(n);
  out.spectrum.values.resize(n, 1);
  out.errors.resize(n, 1);

#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index c = seg.col_of_bin.at(bins[i]);
    const Eigen::VectorXcd zp = seg.zf.col(c);
    const Eigen::VectorXcd zm = zp.conjugate();
    out.spectrum.omega1[i] = seg.omega(bins[i]);
    out.spectrum.values(i, 0) = kstat2(zp, zm, -1) / seg.w2;
    out.errors(i, 0) =
        jackknife_sigma(seg.m(), [&](Eigen::Index s) { return kstat2(zp, zm, s) / seg.w2; });
  }
  return out;
}

EstimatedSpectrum estimate_s3(std::span<const Trajectory> traces, const EstimatorConfig& cfg) {
  const double dt = traces.empty() ? 1.0 : traces[0].dt;
  const auto axis = axis_bins(cfg, dt, 3);
  std::vector<Eigen::Index> need = axis;
  for (Eigen::Index qa : axis)
    for (Eigen::Index qb : axis) need.push_back(qa + qb);
  const auto seg = segment_ffts(traces, cfg, std::move(need));
  const Eigen::Index n = static_cast<Eigen::Index>(axis.size());

  EstimatedSpectrum out;
  out.segments = seg.m();
  out.spectrum.order = 3;
  out.spectrum.omega1.resize(n);
  out.spectrum.omega2.resize(n);
  out.spectrum.values.resize(n, n);
  out.errors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.spectrum.omega1[i] = seg.omega(axis[i]);
    out.spectrum.omega2[i] = seg.omega(axis[i]);
  }

  std::vector<std::pair<Eigen::Index, Eigen::Index>> tasks;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) tasks.emplace_back(i, j);

#pragma omp parallel for schedule(dynamic)
  for (size_t t = 0; t < tasks.size(); ++t) {
    const auto [i, j] = tasks[t];
    const Eigen::VectorXcd za = seg.zf.col(seg.col_of_bin.at(axis[i]));
    const Eigen::VectorXcd zb = seg.zf.col(seg.col_of_bin.at(axis[j]));
    const Eigen::VectorXcd zs = seg.zf.col(seg.col_of_bin.at(axis[i] + axis[j])).conjugate();
    out.spectrum.values(i, j) = kstat3(za, zb, zs, -1) / seg.w3;
    out.errors(i, j) = jackknife_sigma(
        seg.m(), [&](Eigen::Index s) { return kstat3(za, zb, zs, s) / seg.w3; });
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      out.spectrum.values(i, j) = out.spectrum.values(j, i);
      out.errors(i, j) = out.errors(j, i);
    }
  return out;
}

EstimatedSpectrum estimate_s4(std::span<const Trajectory> traces, const EstimatorConfig& cfg) {
  const double dt = traces.empty() ? 1.0 : traces[0].dt;
  const auto axis = axis_bins(cfg, dt, 4);
  const auto seg = segment_ffts(traces, cfg, axis);
  const Eigen::Index n = static_cast<Eigen::Index>(axis.size());

  EstimatedSpectrum out;
  out.segments = seg.m();
  out.spectrum.order = 4;
  out.spectrum.omega1.resize(n);
  out.spectrum.omega2.resize(n);
  out.spectrum.values.resize(n, n);
  out.errors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.spectrum.omega1[i] = seg.omega(axis[i]);
    out.spectrum.omega2[i] = seg.omega(axis[i]);
  }

  std::vector<std::pair<Eigen::Index, Eigen::Index>> tasks;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) tasks.emplace_back(i, j);

#pragma omp parallel for schedule(dynamic)
  for (size_t t = 0; t < tasks.size(); ++t) {
    const auto [i, j] = tasks[t];
    const Eigen::VectorXcd za = seg.zf.col(seg.col_of_bin.at(axis[i]));
    const Eigen::VectorXcd zac = za.conjugate();
    const Eigen::VectorXcd zb = seg.zf.col(seg.col_of_bin.at(axis[j]));
    const Eigen::VectorXcd zbc = zb.conjugate();
    out.spectrum.values(i, j) = kstat4(za, zac, zb, zbc, -1) / seg.w4;
    out.errors(i, j) = jackknife_sigma(
        seg.m(), [&](Eigen::Index s) { return kstat4(za, zac, zb, zbc, s) / seg.w4; });
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      out.spectrum.values(i, j) = out.spectrum.values(j, i);
      out.errors(i, j) = out.errors(j, i);
    }
  return out;
}

EstimatedSpectrum estimate_s2(const Trajectory& trace, const EstimatorConfig& cfg) {
  return estimate_s2(std::span<const Trajectory>{&trace, 1}, cfg);
}
EstimatedSpectrum estimate_s3(const Trajectory& trace, const EstimatorConfig& cfg) {
  return estimate_s3(std::span<const Trajectory>{&trace, 1}, cfg);
}
EstimatedSpectrum estimate_s4(const Trajectory& trace, const EstimatorConfig& cfg) {
  return estimate_s4(std::span<const Trajectory>{&trace, 1}, cfg);
}

PolySpectrum subtract_background(const PolySpectrum& spectrum,
                                 const PolySpectrum& reference) {
  if (spectrum.order != reference.order)
    throw ConfigError("subtract_background: order mismatch");
  if (spectrum.omega1 != reference.omega1 || spectrum.omega2 != reference.omega2)
    throw ConfigError("subtract_background: frequency grids do not match");
  PolySpectrum out = spectrum;
  out.values -= reference.values;
  out.includes_noise_floor = spectrum.includes_noise_floor && !reference.includes_noise_floor;
  out.note = "background-subtracted" +
             (reference.note.empty() ? std::string{} : " (reference: " + reference.note + ")");
  return out;
}

}  // namespace polyspec
