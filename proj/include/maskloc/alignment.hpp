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

#include "maskloc/signal.hpp"
#include "maskloc/stft.hpp"

namespace maskloc {

/// Outcome of frame-level alignment of the close-talk channel.
///
/// `score_curve[i]` is the frequency-summed GCC-PHAT score of candidate delay
/// `tau = i - max_delay_frames`. Positive delays mean the close-talk channel
/// arrives later than the array reference.
struct AlignmentResult {
  int frame_delay = 0;
  int max_delay_frames = 0;
  Eigen::VectorXd score_curve;
  TimeSignal aligned_signal;

  double score_at(int tau) const { return score_curve[tau + max_delay_frames]; }
};

// Envelope magnitudes below this are treated as zero in PHAT denominators.
inline constexpr double kPhatFloor = 1e-12;

/// Frequency-wise GCC-PHAT along the frame axis of the beta-compressed
/// magnitude envelopes. Row tau (0..L-1, circular) and column f hold
/// r[tau, f]; a close-talk envelope delayed by k frames peaks at row k.
/// The shorter spectrogram is zero-padded to the longer frame count.
Eigen::MatrixXd frame_xcorr_phat(const Spectrogram& ref_spec, const Spectrogram& close_spec, double beta);

/// Frame-shifted copy: out[l, f] = spec[l + tau, f], zero outside the input.
Spectrogram shift_frames(const Spectrogram& spec, int tau);

/// Searches tau in [-max_delay_frames, max_delay_frames] for the maximum of
/// the summed GCC-PHAT curve, then resynthesizes the shifted close-talk
/// channel with the array reference's length. Ties go to the smallest |tau|,
/// then the smallest tau.
AlignmentResult coarse_align(const TimeSignal& array_ref, const TimeSignal& close, const StftConfig& config,
                             double beta, int max_delay_frames);

}  // namespace maskloc
