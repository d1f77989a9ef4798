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

#include <cstdint>
#include <optional>

#include "maskloc/doa.hpp"
#include "maskloc/signal.hpp"

namespace maskloc {

/// Free-field scene description.
///
/// `snr_db` is the target-to-(interferer + white noise) power ratio at the
/// array, measured over the span where the target is active (from its first
/// to its last nonzero dry sample) or over the whole recording; nullopt
/// renders a clean scene. With an interferer present and
/// `white_noise` on, the interference power is split according to
/// `interferer_to_noise_db`. Positive `wireless_delay_samples` delays the
/// close-talk channel relative to the array.
struct SceneSpec {
  enum class SnrSpan { TargetActive, WholeRecording };

  ArrayGeometry geometry = ArrayGeometry::circular();
  double sample_rate = 16000.0;
  double target_azimuth_deg = 0.0;
  double target_distance_m = 3.0;
  std::optional<double> interferer_azimuth_deg;
  double interferer_distance_m = 3.0;
  std::optional<double> snr_db;
  SnrSpan snr_span = SnrSpan::TargetActive;
  bool white_noise = true;
  double interferer_to_noise_db = 10.0;
  Index wireless_delay_samples = 0;
  std::optional<Eigen::VectorXd> close_ir;
  bool spherical_wave = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Separately rendered array components; `array = target + interferer + noise`.
struct SceneComponents {
  Eigen::MatrixXd target;
  Eigen::MatrixXd interferer;
  Eigen::MatrixXd noise;
};

struct RenderedScene {
  MultichannelSignal array;
  TimeSignal close;
  double truth_azimuth_deg = 0.0;
  SceneComponents components;
};

/// Renders the array recording (plane-wave fractional delays, or spherical
/// propagation when requested) plus the noise-free close-talk channel.
/// Throws InvalidArgumentError on sample-rate mismatches.
RenderedScene render_scene(const SceneSpec& spec, const TimeSignal& target_dry,
                           const std::optional<TimeSignal>& interferer_dry = std::nullopt);

/// Delays `x` by a possibly fractional, possibly negative number of samples
/// with a 32-tap Kaiser-windowed sinc; output has the input's length and is
/// zero where the delayed support leaves the signal.
Eigen::VectorXd fractional_delay(const Eigen::VectorXd& x, double delay_samples);

/// Speech-like test signal: formant-shaped noise under a syllable-rate
/// envelope with pauses. Deterministic in `seed`.
TimeSignal synth_speech_like(double duration_s, std::uint64_t seed, double sample_rate = 16000.0);

}  // namespace maskloc
