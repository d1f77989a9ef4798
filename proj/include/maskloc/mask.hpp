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

#include <string>
#include <string_view>

#include "maskloc/stft.hpp"

namespace maskloc {

/// None is the all-ones baseline (no masking).
enum class MaskKind { None, Irm, IrmStar };

std::string to_string(MaskKind kind);
// Accepts "none", "irm", "irm-star" (also "irm*", "irm_star").
MaskKind parse_mask_kind(std::string_view text);

/// Soft time-frequency weights in [0, 1], frames x bins.
struct RatioMask {
  Eigen::MatrixXd values;
  MaskKind kind = MaskKind::None;
  double alpha = 0.0;

  Index frames() const { return values.rows(); }
  Index freqs() const { return values.cols(); }
};

/// |X|^2 / (|X|^2 + |B|^2), with silent bins (0/0) mapped to 0.
RatioMask compute_irm(const Spectrogram& speech_spec, const Spectrogram& noise_spec);

/// Ratio mask with a per-bin noise floor: (alpha / L) * sum_k |B[k, f]|^2 is
/// added to every denominator in column f.
RatioMask compute_irm_star(const Spectrogram& speech_spec, const Spectrogram& noise_spec, double alpha);

RatioMask ones_mask(Index frames, Index bins);

RatioMask compute_mask(MaskKind kind, const Spectrogram& speech_spec, const Spectrogram& noise_spec, double alpha);

}  // namespace maskloc
