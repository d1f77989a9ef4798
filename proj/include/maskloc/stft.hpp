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
#include <optional>

#include <Eigen/Dense>

#include "maskloc/signal.hpp"

namespace maskloc {

enum class WindowKind { Hann };

/// Framing parameters shared by every spectral stage. Frame size N and hop
/// size default to 512 / 128 samples.
struct StftConfig {
  Index frame_size = 512;
  Index hop_size = 128;
  WindowKind window = WindowKind::Hann;

  Index num_bins() const { return frame_size / 2 + 1; }

  // Frames start at multiples of the hop; the last partial frame is
  // zero-padded, so every sample is covered by at least one frame.
  Index num_frames(Index length) const {
    if (length < frame_size) return 0;
    return (length - frame_size + hop_size - 1) / hop_size + 1;
  }

  // Length of the signal reconstructed from `frames` frames.
  Index synthesis_length(Index frames) const {
    return frames == 0 ? 0 : (frames - 1) * hop_size + frame_size;
  }

  void validate() const;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

/// Periodic Hann window of length N (w[0] = 0), the variant that overlap-adds
/// to a constant at hops of N/2 and N/4.
Eigen::VectorXd analysis_window(const StftConfig& config);

/// One-sided complex spectrogram, frames x bins (L x N/2+1).
struct Spectrogram {
  Eigen::MatrixXcd bins;
  StftConfig config;
  double sample_rate = 16000.0;

  Index frames() const { return bins.rows(); }
  Index freqs() const { return bins.cols(); }
};

// Throws InsufficientDataError when the signal is shorter than one frame.
Spectrogram stft(const TimeSignal& signal, const StftConfig& config);

// Weighted overlap-add with the analysis window, normalized sample-wise by
// the overlapped squared-window sum. Output has synthesis_length(L) samples
// unless `length` is given, in which case it is truncated or zero-padded.
// Throws InvalidArgumentError when the squared-window sum vanishes somewhere
// in steady state (e.g. Hann with hop == frame size).
TimeSignal istft(const Spectrogram& spec, std::optional<Index> length = std::nullopt);

// Steady-state squared-window overlap sum over one hop period. Positive
// everywhere iff overlap-add inversion is possible.
Eigen::VectorXd overlap_envelope(const StftConfig& config);

/// Entrywise |X|^beta. Zero magnitudes stay zero for every beta, so beta = 0
/// maps nonzero bins to 1 and silent bins to 0.
template <typename Derived>
Eigen::MatrixXd compress_magnitude(const Eigen::MatrixBase<Derived>& bins, double beta) {
  Eigen::MatrixXd out = bins.cwiseAbs();
  if (beta == 1.0) return out;
  return out.unaryExpr([beta](double m) { return m > 0.0 ? std::pow(m, beta) : 0.0; });
}

// Throws InvalidArgumentError unless beta is in [0, 1].
Eigen::MatrixXd magnitude_compress(const Spectrogram& spec, double beta);

}  // namespace maskloc
