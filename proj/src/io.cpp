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

#include "polyspec/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace polyspec {

namespace {

static_assert(std::endian::native == std::endian::little,
              "trajectory binary format assumes a little-endian host");

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path.string());
  return os;
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& w1,
                      const std::vector<double>& w2, const Eigen::MatrixXd& m) {
  auto os = open_out(path);
  os << "omega1_rad_per_ns\\omega2";
  for (double w : w2) os << ',' << fmt(w);
  os << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << fmt(w1[i]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << ',' << fmt(m(i, j));
    os << '\n';
  }
}

}  // namespace

void write_spectrum_csv(const PolySpectrum& sp, const std::filesystem::path& path,
                        const Eigen::MatrixXd* errors) {
  if (sp.order == 2) {
    auto os = open_out(path);
    os << "omega_rad_per_ns,f_GHz,value_re,value_im";
    if (errors) os << ",stderr";
    os << '\n';
    for (Eigen::Index i = 0; i < sp.values.rows(); ++i) {
      os << fmt(sp.omega1[i]) << ',' << fmt(sp.omega1[i] / (2.0 * M_PI)) << ','
         << fmt(sp.values(i, 0).real()) << ',' << fmt(sp.values(i, 0).imag());
      if (errors) os << ',' << fmt((*errors)(i, 0));
      os << '\n';
    }
    return;
  }
  write_matrix_csv(path, sp.omega1, sp.omega2, sp.values.real());
  auto sibling = [&](const char* tag) {
    std::filesystem::path p = path;
    p.replace_filename(p.stem().string() + tag + p.extension().string());
    return p;
  };
  write_matrix_csv(sibling("_im"), sp.omega1, sp.omega2, sp.values.imag());
  if (errors) write_matrix_csv(sibling("_err"), sp.omega1, sp.omega2, *errors);
}

void write_spectrum_json(const PolySpectrum& sp, const std::filesystem::path& path,
                         const Eigen::MatrixXd* errors) {
  nlohmann::json j;
  j["order"] = sp.order;
  j["omega1_rad_per_ns"] = sp.omega1;
  if (!sp.omega2.empty()) j["omega2_rad_per_ns"] = sp.omega2;
  j["beta2"] = sp.beta2;
  j["includes_noise_floor"] = sp.includes_noise_floor;
  if (!sp.note.empty()) j["note"] = sp.note;
  std::vector<std::vector<double>> re(sp.values.rows()), im(sp.values.rows());
  for (Eigen::Index i = 0; i < sp.values.rows(); ++i)
    for (Eigen::Index c = 0; c < sp.values.cols(); ++c) {
      re[i].push_back(sp.values(i, c).real());
      im[i].push_back(sp.values(i, c).imag());
    }
  j["re"] = re;
  j["im"] = im;
  if (errors) {
    std::vector<std::vector<double>> err(errors->rows());
    for (Eigen::Index i = 0; i < errors->rows(); ++i)
      for (Eigen::Index c = 0; c < errors->cols(); ++c) err[i].push_back((*errors)(i, c));
    j["stderr"] = err;
  }
  open_out(path) << j.dump(1) << '\n';
}

PolySpectrum read_spectrum_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open: " + path.string());
  nlohmann::json j = nlohmann::json::parse(is);
  PolySpectrum sp;
  sp.order = j.at("order").get<int>();
  sp.omega1 = j.at("omega1_rad_per_ns").get<std::vector<double>>();
  if (j.contains("omega2_rad_per_ns"))
    sp.omega2 = j.at("omega2_rad_per_ns").get<std::vector<double>>();
  sp.beta2 = j.value("beta2", 0.0);
  sp.includes_noise_floor = j.value("includes_noise_floor", false);
  sp.note = j.value("note", std::string{});
  const auto re = j.at("re").get<std::vector<std::vector<double>>>();
  const auto im = j.at("im").get<std::vector<std::vector<double>>>();
  sp.values.resize(re.size(), re.empty() ? 0 : re[0].size());
  for (Eigen::Index i = 0; i < sp.values.rows(); ++i)
    for (Eigen::Index c = 0; c < sp.values.cols(); ++c)
      sp.values(i, c) = cxd{re[i][c], im[i][c]};
  return sp;
}

void write_trajectory_binary(const Trajectory& traj, const std::filesystem::path& base) {
  std::filesystem::path data = base;
  data += ".f64";
  if (data.has_parent_path()) std::filesystem::create_directories(data.parent_path());
  std::ofstream os(data, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + data.string());
  os.write(reinterpret_cast<const char*>(traj.z.data()),
           static_cast<std::streamsize>(traj.z.size() * sizeof(double)));

  nlohmann::json j;
  j["dt_ns"] = traj.dt;
  j["seed"] = traj.seed;
  j["samples"] = traj.z.size();
  j["model_fingerprint"] = traj.model_fingerprint;
  for (const auto& [label, series] : traj.observables) j["observables"][label] = series;
  std::filesystem::path side = base;
  side += ".json";
  open_out(side) << j.dump(1) << '\n';
}

Trajectory read_trajectory_binary(const std::filesystem::path& base) {
  std::filesystem::path side = base;
  side += ".json";
  std::ifstream is(side);
  if (!is) throw ConfigError("cannot open: " + side.string());
  nlohmann::json j = nlohmann::json::parse(is);

  Trajectory traj;
  traj.dt = j.at("dt_ns").get<double>();
  traj.seed = j.at("seed").get<uint64_t>();
  traj.model_fingerprint = j.value("model_fingerprint", std::string{});
  const size_t n = j.at("samples").get<size_t>();
  if (j.contains("observables"))
    for (const auto& [label, series] : j.at("observables").items())
      traj.observables[label] = series.get<std::vector<double>>();

  std::filesystem::path data = base;
  data += ".f64";
  std::ifstream ds(data, std::ios::binary);
  if (!ds) throw ConfigError("cannot open: " + data.string());
  traj.z.resize(n);
  ds.read(reinterpret_cast<char*>(traj.z.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (static_cast<size_t>(ds.gcount()) != n * sizeof(double))
    throw ConfigError("trajectory data file truncated: " + data.string());
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "t_ns,z";
  for (const auto& [label, series] : traj.observables) os << ',' << label;
  os << '\n';
  for (size_t k = 0; k < traj.z.size(); ++k) {
    os << fmt(double(k) * traj.dt) << ',' << fmt(traj.z[k]);
    for (const auto& [label, series] : traj.observables)
      os << ',' << fmt(k < series.size() ? series[k] : 0.0);
    os << '\n';
  }
}

}  // namespace polyspec
