// Copyright 2026 The maskloc Authors
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

#include "maskloc/doa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace maskloc {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Eigen::Vector3d direction_from_angles(double azimuth_deg, double elevation_deg) {
  const double az = azimuth_deg * kDegToRad;
  const double el = elevation_deg * kDegToRad;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

// Spatial wavenumber per unit of bin index: (fs / c) * (2 pi / N).
double bin_wavenumber(const ArrayGeometry& geometry, double sample_rate, const StftConfig& config) {
  return sample_rate / geometry.speed_of_sound * 2.0 * std::numbers::pi / static_cast<double>(config.frame_size);
}

}  // namespace

ArrayGeometry ArrayGeometry::circular(Index num_mics, double radius, double speed_of_sound) {
  ArrayGeometry g;
  g.speed_of_sound = speed_of_sound;
  g.positions.resize(3, num_mics);
  for (Index m = 0; m < num_mics; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(num_mics);
    g.positions.col(m) << radius * std::cos(angle), radius * std::sin(angle), 0.0;
  }
  return g;
}

ArrayGeometry ArrayGeometry::rotated_about_z(double degrees) const {
  ArrayGeometry g = *this;
  g.positions = Eigen::AngleAxisd(degrees * kDegToRad, Eigen::Vector3d::UnitZ()).toRotationMatrix() * positions;
  return g;
}

void ArrayGeometry::validate() const {
  if (size() < 2) throw InvalidArgumentError("array needs at least two microphones");
  if (!(speed_of_sound > 0.0)) throw InvalidArgumentError("speed of sound must be positive");
  if (!positions.allFinite()) throw InvalidArgumentError("microphone positions must be finite");
  for (Index p = 0; p < size(); ++p)
    for (Index q = p + 1; q < size(); ++q)
      if ((positions.col(p) - positions.col(q)).norm() < 1e-9)
        throw InvalidArgumentError("microphones " + std::to_string(p) + " and " + std::to_string(q) +
                                   " share a position");
}

DoaGrid DoaGrid::azimuth_ring(double step_deg) {
  if (!(step_deg > 0.0) || step_deg > 360.0) throw InvalidArgumentError("grid step must be in (0, 360] degrees");
  const auto count = static_cast<Index>(std::ceil(360.0 / step_deg - 1e-9));
  DoaGrid grid;
  grid.directions.resize(3, count);
  grid.azimuth_deg.resize(count);
  grid.elevation_deg = Eigen::VectorXd::Zero(count);
  for (Index i = 0; i < count; ++i) {
    grid.azimuth_deg[i] = static_cast<double>(i) * step_deg;
    grid.directions.col(i) = direction_from_angles(grid.azimuth_deg[i], 0.0);
  }
  return grid;
}

DoaGrid DoaGrid::icosphere(int subdivisions) {
  if (subdivisions < 0) throw InvalidArgumentError("subdivision level must be nonnegative");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoints;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = midpoint(f[0], f[1]);
      const int bc = midpoint(f[1], f[2]);
      const int ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  Eigen::Matrix3Xd dirs(3, static_cast<Index>(verts.size()));
  for (Index i = 0; i < dirs.cols(); ++i) dirs.col(i) = verts[static_cast<size_t>(i)];
  return from_directions(dirs);
}

DoaGrid DoaGrid::from_directions(const Eigen::Matrix3Xd& directions) {
  DoaGrid grid;
  grid.directions = directions;
  grid.azimuth_deg.resize(directions.cols());
  grid.elevation_deg.resize(directions.cols());
  for (Index i = 0; i < directions.cols(); ++i) {
    grid.azimuth_deg[i] = azimuth_of(directions.col(i));
    grid.elevation_deg[i] = std::asin(std::clamp(directions(2, i), -1.0, 1.0)) / kDegToRad;
  }
  grid.validate();
  return grid;
}

void DoaGrid::validate() const {
  if (size() == 0) throw InvalidArgumentError("DoA grid is empty");
  for (Index i = 0; i < size(); ++i)
    if (std::abs(directions.col(i).norm() - 1.0) > 1e-9)
      throw InvalidArgumentError("grid direction " + std::to_string(i) + " is not a unit vector");
  for (Index i = 0; i < size(); ++i)
    for (Index j = i + 1; j < size(); ++j)
      if ((directions.col(i) - directions.col(j)).squaredNorm() < 1e-18)
        throw InvalidArgumentError("grid contains duplicate directions");
}

double azimuth_of(const Eigen::Vector3d& direction) {
  double az = std::atan2(direction.y(), direction.x()) / kDegToRad;
  if (az < 0.0) az += 360.0;
  return az >= 360.0 ? az - 360.0 : az;
}

ScmPair compute_scms(const std::vector<Spectrogram>& array_spec, const RatioMask& mask, double loading_rel) {
  if (array_spec.empty()) throw InvalidArgumentError("no channel spectrograms given");
  if (!(loading_rel >= 0.0)) throw InvalidArgumentError("diagonal loading must be nonnegative");
  const Index channels = static_cast<Index>(array_spec.size());
  const Index frames = array_spec.front().frames();
  const Index bins = array_spec.front().freqs();
  for (const auto& s : array_spec)
    if (s.frames() != frames || s.freqs() != bins)
      throw ShapeMismatchError("channel spectrograms differ in shape");
  if (mask.frames() != frames || mask.freqs() != bins)
    throw ShapeMismatchError("mask is " + std::to_string(mask.frames()) + "x" + std::to_string(mask.freqs()) +
                             " but spectrograms are " + std::to_string(frames) + "x" + std::to_string(bins));

  ScmPair out;
  out.loading = loading_rel;
  out.speech.resize(static_cast<size_t>(bins));
  out.noise.resize(static_cast<size_t>(bins));

  Eigen::MatrixXcd stacked(channels, frames);
  Eigen::MatrixXcd weighted(channels, frames);
  for (Index f = 0; f < bins; ++f) {
    for (Index m = 0; m < channels; ++m) stacked.row(m) = array_spec[static_cast<size_t>(m)].bins.col(f).transpose();
    const Eigen::VectorXd w = mask.values.col(f);

    weighted = stacked * w.asDiagonal();
    Eigen::MatrixXcd speech = weighted * stacked.adjoint();
    weighted = stacked * (1.0 - w.array()).matrix().asDiagonal();
    Eigen::MatrixXcd noise = weighted * stacked.adjoint();

    speech = (0.5 * (speech + speech.adjoint())).eval();
    noise = (0.5 * (noise + noise.adjoint())).eval();

    const double trace = noise.trace().real();
    const double load = trace > 0.0 ? loading_rel * trace / static_cast<double>(channels) : loading_rel;
    noise.diagonal().array() += load;

    out.speech[static_cast<size_t>(f)] = std::move(speech);
    out.noise[static_cast<size_t>(f)] = std::move(noise);
  }
  return out;
}

ComplexMatrices whiten(const ScmPair& scms) {
  if (scms.speech.size() != scms.noise.size()) throw ShapeMismatchError("speech and noise SCM counts differ");
  ComplexMatrices out(scms.speech.size());
  for (size_t f = 0; f < scms.speech.size(); ++f) {
    Eigen::LLT<Eigen::MatrixXcd> llt(scms.noise[f]);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14))
      throw NumericalError("noise SCM at bin " + std::to_string(f) +
                           " is singular; increase the diagonal loading");
    out[f] = llt.solve(scms.speech[f]);
  }
  return out;
}

std::complex<double> steering_phase(const ArrayGeometry& geometry, double sample_rate, const StftConfig& config,
                                    Index p, Index q, const Eigen::Vector3d& direction, Index bin) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw InvalidArgumentError("steering direction must be a unit vector");
  if (p == q) throw InvalidArgumentError("steering pair needs two distinct microphones");
  const double delay = (geometry.positions.col(p) - geometry.positions.col(q)).dot(direction);
  const double phase = bin_wavenumber(geometry, sample_rate, config) * static_cast<double>(bin) * delay;
  return std::polar(1.0, -phase);
}

DoaResult srp_phat_scan(const ComplexMatrices& whitened, const ArrayGeometry& geometry, const DoaGrid& grid,
                        const StftConfig& config, double sample_rate, const ScanBand& band) {
  if (grid.size() == 0) throw InvalidArgumentError("DoA grid is empty");
  grid.validate();
  const Index bins = static_cast<Index>(whitened.size());
  const Index channels = geometry.size();
  for (const auto& m : whitened)
    if (m.rows() != channels || m.cols() != channels)
      throw ShapeMismatchError("whitened matrices do not match the array size");

  const Index lo = std::max<Index>(band.min_bin, 0);
  const Index hi = band.max_bin < 0 ? bins - 2 : std::min(band.max_bin, bins - 1);
  const Index width = std::max<Index>(hi - lo + 1, 0);

  // Phase-transformed pair terms, one row per pair.
  const Index pairs = channels * (channels - 1) / 2;
  Eigen::MatrixXcd unit(pairs, width);
  Eigen::Matrix3Xd baselines(3, pairs);
  Index pair = 0;
  for (Index p = 0; p < channels; ++p) {
    for (Index q = p + 1; q < channels; ++q, ++pair) {
      baselines.col(pair) = geometry.positions.col(p) - geometry.positions.col(q);
      for (Index i = 0; i < width; ++i) {
        const std::complex<double> phi = whitened[static_cast<size_t>(lo + i)](p, q);
        const double mag = std::abs(phi);
        unit(pair, i) = mag > 0.0 ? phi / mag : std::complex<double>(0.0);
      }
    }
  }

  const double k = bin_wavenumber(geometry, sample_rate, config);
  DoaResult result;
  result.power_map = Eigen::VectorXd::Zero(grid.size());
  for (Index g = 0; g < grid.size(); ++g) {
    const Eigen::VectorXd delays = baselines.transpose() * grid.directions.col(g);
    double power = 0.0;
    for (Index pr = 0; pr < pairs; ++pr) {
      const double a = k * delays[pr];
      const std::complex<double> rotor = std::polar(1.0, -a);
      std::complex<double> w = std::polar(1.0, -a * static_cast<double>(lo));
      double acc = 0.0;
      for (Index i = 0; i < width; ++i) {
        acc += (unit(pr, i) * w).real();
        w *= rotor;
      }
      power += acc;
    }
    result.power_map[g] = power;
  }

  Index best = 0;
  for (Index g = 1; g < grid.size(); ++g)
    if (result.power_map[g] > result.power_map[best]) best = g;
  result.best_index = best;
  result.best_direction = grid.directions.col(best);
  result.best_azimuth_deg = grid.azimuth_deg[best];
  result.best_elevation_deg = grid.elevation_deg[best];
  return result;
}

}  // namespace maskloc
