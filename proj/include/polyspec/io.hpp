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

#include <filesystem>
#include <optional>

#include "polyspec/estimator.hpp"

namespace polyspec {

// CSV layouts:
//   order 2:   omega_rad_per_ns,f_GHz,value_re,value_im[,stderr]
//   order 3/4: matrix layout; row header = omega1, column header = omega2
//              (rad/ns). <path> holds the real part; an "_im" sibling the
//              imaginary part, and "_err" the error bars when present.
void write_spectrum_csv(const PolySpectrum& sp, const std::filesystem::path& path,
                        const Eigen::MatrixXd* errors = nullptr);

/// Single JSON document with grids, re/im matrices and metadata.
void write_spectrum_json(const PolySpectrum& sp, const std::filesystem::path& path,
                         const Eigen::MatrixXd* errors = nullptr);

PolySpectrum read_spectrum_json(const std::filesystem::path& path);

// Trajectory export: <base>.f64 is a little-endian double array of z;
// <base>.json carries dt, seed, sample count, model fingerprint and any
// recorded observables.
void write_trajectory_binary(const Trajectory& traj, const std::filesystem::path& base);
Trajectory read_trajectory_binary(const std::filesystem::path& base);

/// Columns: t_ns,z[,<observable>...]
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace polyspec
