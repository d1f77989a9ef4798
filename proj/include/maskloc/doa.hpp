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

#pragma once

#include <complex>
#include <vector>

#include "maskloc/mask.hpp"
#include "maskloc/stft.hpp"

namespace maskloc {

/// Microphone positions (meters, one column per mic) and speed of sound.
struct ArrayGeometry {
  Eigen::Matrix3Xd positions;
  double speed_of_sound = 343.0;

  Index size() const { return positions.cols(); }

  /// M microphones evenly spaced on a horizontal circle, mic 0 on +x and
  /// indices increasing counter-clockwise. Defaults to the 16-mic,
  /// 0.516 m-radius ring.
  static ArrayGeometry circular(Index num_mics = 16, double radius = 0.516, double speed_of_sound = 343.0);

  ArrayGeometry rotated_about_z(double degrees) const;

  void validate() const;
};

/// Candidate unit vectors pointing from the array center to the source.
struct DoaGrid {
  Eigen::Matrix3Xd directions;
  Eigen::VectorXd azimuth_deg;
  Eigen::VectorXd elevation_deg;

  Index size() const { return directions.cols(); }

  /// Horizontal ring at elevation 0, azimuths 0, step, 2*step, ... < 360.
  static DoaGrid azimuth_ring(double step_deg = 1.0);
  /// Geodesic sphere from a recursively subdivided icosahedron
  /// (12, 42, 162, 642, ... points).
  static DoaGrid icosphere(int subdivisions);
  static DoaGrid from_directions(const Eigen::Matrix3Xd& directions);

  void validate() const;
};

using ComplexMatrices = std::vector<Eigen::MatrixXcd>;

/// Mask-weighted speech and noise spatial covariance matrices, one M x M
/// matrix per frequency bin. `noise` already includes diagonal loading.
struct ScmPair {
  ComplexMatrices speech;
  ComplexMatrices noise;
  double loading = 0.0;
};

/// Speech SCM = sum_l mask * U U^H, noise SCM = sum_l (1 - mask) * U U^H,
/// where U[l, f] stacks every channel. The noise SCM is then loaded with
/// loading_rel * trace / M on its diagonal (loading_rel * I if the trace is 0).
ScmPair compute_scms(const std::vector<Spectrogram>& array_spec, const RatioMask& mask, double loading_rel);

/// Per-bin noise-whitened speech SCM, noise^{-1} * speech.
/// Throws NumericalError when a noise SCM is not numerically positive definite.
ComplexMatrices whiten(const ScmPair& scms);

/// Free-field pair steering term exp(-j (fs / c) (2 pi f / N) (d_p - d_q) . theta),
/// conjugate-matched to the phase a plane wave from `direction` leaves in the
/// p, q entry of an outer-product SCM.
std::complex<double> steering_phase(const ArrayGeometry& geometry, double sample_rate, const StftConfig& config,
                                    Index p, Index q, const Eigen::Vector3d& direction, Index bin);

/// Inclusive bin range used by the scan; max_bin < 0 means F - 2 (DC and
/// Nyquist are skipped by default).
struct ScanBand {
  Index min_bin = 1;
  Index max_bin = -1;
};

struct DoaResult {
  Index best_index = 0;
  Eigen::Vector3d best_direction = Eigen::Vector3d::UnitX();
  double best_azimuth_deg = 0.0;
  double best_elevation_deg = 0.0;
  Eigen::VectorXd power_map;
};

/// Pairwise SRP-PHAT over the grid: E[theta] = sum_{p<q} Re sum_f
/// phi_pq / |phi_pq| * W_pq[theta, f]. Ties go to the lowest grid index.
DoaResult srp_phat_scan(const ComplexMatrices& whitened, const ArrayGeometry& geometry, const DoaGrid& grid,
                        const StftConfig& config, double sample_rate, const ScanBand& band = {});

/// Azimuth in [0, 360) of a direction vector.
double azimuth_of(const Eigen::Vector3d& direction);

}  // namespace maskloc
