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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maskloc/pipeline.hpp"
#include "maskloc/scene.hpp"
#include "maskloc/wav.hpp"

namespace maskloc {

/// Pipeline settings from an INI-style file.
///
///   [pipeline]            keys named after the processing parameters
///   fs = 16000            sample rate (Hz)
///   c = 343               speed of sound (m/s)
///   N = 512               frame size
///   delta_N = 128         hop size
///   alpha = 0.05          IRM* noise floor
///   beta = 0.25           envelope compression
///   sigma = 1e-4          Kalman process noise
///   D = 256               AEC taps
///   P0 = 0.01             initial AEC state covariance
///   loading = 1e-3        relative diagonal loading
///   grid_deg = 1          azimuth grid step
///   mask = irm-star       none | irm | irm-star
///   max_delay_s = 2       alignment search range each way
///   min_bin = 1, max_bin = -1, reference_channel = 0, lookahead = -1
///   aec_passes = 2        echo-canceller passes (later ones warm-started)
///
///   [array]
///   num_mics = 16, radius = 0.516   circular layout, or
///   positions = x y z; x y z; ...   explicit coordinates (meters)
///
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig parse_pipeline_config(const std::string& text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Sixteen azimuths starting at 0 in 22.5 degree steps.
std::vector<double> standard_azimuth_sweep();

struct SceneJob {
  std::string id;
  SceneSpec spec;
  std::uint64_t target_seed = 0;
  std::uint64_t interferer_seed = 0;
  double duration_s = 3.0;
  double lead_silence_s = 0.0;
  double trail_silence_s = 0.0;
};

/// Batch of simulated scenes, the [scene] section of a config file:
///
///   azimuths = sweep            16 directions 22.5 deg apart, or a list
///   snr_db = 1, 5, 10           list, or "clean"
///   seeds = 5                   repetitions per (azimuth, SNR) cell
///   base_seed = 1
///   duration_s = 3              recording length
///   lead_silence_s = 0.5        silence before the target utterance
///   trail_silence_s = 0.5       silence after it
///   interferer = random         none | random | fixed offset in degrees
///   interferer_to_noise_db = 10
///   white_noise = true
///   wireless_delay_samples = 1000      or a range "lo:hi" drawn per scene
///   spherical = false, distance_m = 3
///   format = float32            float32 | pcm16
///
/// The array and sample rate come from the [array] and [pipeline] sections.
struct SceneBatch {
  PipelineConfig pipeline;
  std::vector<double> azimuths_deg = standard_azimuth_sweep();
  std::vector<std::optional<double>> snrs_db = {5.0};
  int seeds = 1;
  std::uint64_t base_seed = 1;
  double duration_s = 3.0;
  double lead_silence_s = 0.5;
  double trail_silence_s = 0.5;
  enum class Interferer { None, Random, FixedOffset } interferer = Interferer::Random;
  double interferer_offset_deg = 180.0;
  double interferer_to_noise_db = 10.0;
  bool white_noise = true;
  Index delay_min = 1000;
  Index delay_max = 1000;
  bool spherical = false;
  double distance_m = 3.0;
  WavFormat format = WavFormat::Float32;

  // Throws InvalidArgumentError for an empty batch.
  std::vector<SceneJob> expand() const;
};

SceneBatch parse_scene_batch(const std::string& text);
SceneBatch load_scene_batch(const std::filesystem::path& path);

/// Renders one job (synthesizing the dry target and interferer).
RenderedScene render_job(const SceneJob& job);

std::string format_snr(const std::optional<double>& snr_db);

}  // namespace maskloc
