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

#include <span>

#include "polyspec/sme.hpp"
#include "polyspec/spectra.hpp"

namespace polyspec {

enum class Window { Rectangular, Hann };

struct EstimatorConfig {
  Eigen::Index segment_length{1024};  // samples per segment, >= 64
  Window window{Window::Hann};
  double overlap{0.0};        // fraction of segment length, [0, 0.75]
  double max_frequency{0.0};  // rad/ns grid cap; 0 selects the representable default
  Eigen::Index grid_decimation{1};  // keep every k-th FFT bin

  void validate() const;
};

/// Estimated spectrum with segment count and jackknife error bars
/// (1 sigma, per grid point, on the complex value's modulus deviation).
struct EstimatedSpectrum {
  PolySpectrum spectrum;
  Eigen::Index segments{0};
  Eigen::MatrixXd errors;
};

// Segment-ensemble estimators: windowed FFT per segment, unbiased sample
// cumulants (k-statistics) across the segment ensemble, normalized so the
// estimate converges to the analytic polyspectrum.
EstimatedSpectrum estimate_s2(const Trajectory& trace, const EstimatorConfig& cfg);
EstimatedSpectrum estimate_s3(const Trajectory& trace, const EstimatorConfig& cfg);
EstimatedSpectrum estimate_s4(const Trajectory& trace, const EstimatorConfig& cfg);

// Segment ensembles may also be pooled from several independent traces.
EstimatedSpectrum estimate_s2(std::span<const Trajectory> traces, const EstimatorConfig& cfg);
EstimatedSpectrum estimate_s3(std::span<const Trajectory> traces, const EstimatorConfig& cfg);
EstimatedSpectrum estimate_s4(std::span<const Trajectory> traces, const EstimatorConfig& cfg);

/// Pointwise difference on identical grids; notes the reference in metadata.
PolySpectrum subtract_background(const PolySpectrum& spectrum,
                                 const PolySpectrum& reference);

}  // namespace polyspec
