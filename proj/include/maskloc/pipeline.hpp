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

#include <vector>

#include "maskloc/aec.hpp"
#include "maskloc/alignment.hpp"
#include "maskloc/doa.hpp"
#include "maskloc/mask.hpp"
#include "maskloc/stft.hpp"

namespace maskloc {

/// Full localization configuration. Defaults: fs = 16 kHz, c = 343 m/s,
/// N = 512, hop = 128, alpha = 0.05, beta = 0.25, sigma = 1e-4, and the
/// 16-mic ring of radius 0.516 m.
struct PipelineConfig {
  double sample_rate = 16000.0;
  StftConfig stft;
  double beta = 0.25;
  AecConfig aec;
  double alpha = 0.05;
  MaskKind mask_kind = MaskKind::IrmStar;
  ArrayGeometry geometry = ArrayGeometry::circular();
  double grid_deg = 1.0;
  double loading_rel = 1e-3;
  double max_delay_s = 2.0;
  ScanBand band;
  Index reference_channel = 0;
  // The aligned close-talk signal is advanced by this many samples before
  // echo cancellation so the FIR can model residual offsets of either sign.
  // Negative means num_taps / 2.
  Index aec_lookahead = -1;
  // Each pass after the first restarts the echo canceller from the previous
  // pass's filter estimate and covariance (with an empty history), so the
  // residual handed to the mask carries no start-up transient.
  int aec_passes = 2;

  Index effective_lookahead() const { return aec_lookahead < 0 ? aec.num_taps / 2 : aec_lookahead; }
  void validate() const;
};

/// Everything upstream of the mask: alignment, echo cancellation and the
/// spectrograms the mask and SCMs are built from. Reusable across mask kinds.
struct FrontEnd {
  AlignmentResult alignment;
  AecOutput aec;
  double erle_db = 0.0;
  Spectrogram speech_spec;
  Spectrogram noise_spec;
  std::vector<Spectrogram> array_spec;
};

FrontEnd run_front_end(const MultichannelSignal& array, const TimeSignal& close, const PipelineConfig& config);

RatioMask mask_for(const FrontEnd& front, MaskKind kind, const PipelineConfig& config);

DoaResult localize_with_mask(const FrontEnd& front, const RatioMask& mask, const PipelineConfig& config);

struct LocalizeResult {
  DoaResult doa;
  RatioMask mask;
  int frame_delay = 0;
  double erle_db = 0.0;
};

/// Coarse alignment, echo cancellation against the reference channel, mask
/// estimation, mask-weighted SCMs, whitening and the SRP-PHAT scan.
LocalizeResult localize(const MultichannelSignal& array, const TimeSignal& close, const PipelineConfig& config);

}  // namespace maskloc
