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

#include "maskloc/alignment.hpp"

#include <cstdlib>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace maskloc {

namespace {

void require_compatible(const Spectrogram& a, const Spectrogram& b) {
  if (!(a.config == b.config) || a.freqs() != b.freqs())
    throw ShapeMismatchError("spectrograms were computed with different STFT configurations");
}

}  // namespace

Eigen::MatrixXd frame_xcorr_phat(const Spectrogram& ref_spec, const Spectrogram& close_spec, double beta) {
  require_compatible(ref_spec, close_spec);
  const Index frames = std::max(ref_spec.frames(), close_spec.frames());
  const Index bins = ref_spec.freqs();
  if (frames == 0) throw InsufficientDataError("empty spectrogram");

  Eigen::MatrixXd env_ref = Eigen::MatrixXd::Zero(frames, bins);
  Eigen::MatrixXd env_close = Eigen::MatrixXd::Zero(frames, bins);
  env_ref.topRows(ref_spec.frames()) = magnitude_compress(ref_spec, beta);
  env_close.topRows(close_spec.frames()) = magnitude_compress(close_spec, beta);

  Eigen::MatrixXd r(frames, bins);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> ru, rc, cross(frames), corr;
  std::vector<std::complex<double>> column(frames);
  const double length = static_cast<double>(frames);
  for (Index f = 0; f < bins; ++f) {
    for (Index l = 0; l < frames; ++l) column[l] = env_ref(l, f);
    fft.fwd(ru, column);
    for (Index l = 0; l < frames; ++l) column[l] = env_close(l, f);
    fft.fwd(rc, column);
    for (Index k = 0; k < frames; ++k) {
      const double denom = std::abs(rc[k]) * std::abs(ru[k]);
      cross[k] = denom > kPhatFloor ? rc[k] * std::conj(ru[k]) / denom : std::complex<double>(0.0);
    }
    // Inverse transform carries e^{+j 2 pi tau k / L}; undo its 1/L scaling.
    fft.inv(corr, cross);
    for (Index tau = 0; tau < frames; ++tau) r(tau, f) = corr[tau].real() * length;
  }
  return r;
}

Spectrogram shift_frames(const Spectrogram& spec, int tau) {
  Spectrogram out;
  out.config = spec.config;
  out.sample_rate = spec.sample_rate;
  out.bins = Eigen::MatrixXcd::Zero(spec.frames(), spec.freqs());
  for (Index l = 0; l < spec.frames(); ++l) {
    const Index src = l + tau;
    if (src >= 0 && src < spec.frames()) out.bins.row(l) = spec.bins.row(src);
  }
  return out;
}

AlignmentResult coarse_align(const TimeSignal& array_ref, const TimeSignal& close, const StftConfig& config,
                             double beta, int max_delay_frames) {
  if (array_ref.sample_rate != close.sample_rate)
    throw InvalidArgumentError("array and close-talk signals have different sample rates");
  if (max_delay_frames < 0) throw InvalidArgumentError("max_delay_frames must be nonnegative");

  const Spectrogram ref_spec = stft(array_ref, config);
  Spectrogram close_spec = stft(close, config);
  const Index frames = std::max(ref_spec.frames(), close_spec.frames());
  if (max_delay_frames >= frames)
    throw InvalidArgumentError("max_delay_frames (" + std::to_string(max_delay_frames) +
                               ") must be smaller than the frame count (" + std::to_string(frames) + ")");

  const Eigen::MatrixXd r = frame_xcorr_phat(ref_spec, close_spec, beta);
  const Eigen::VectorXd summed = r.rowwise().sum();

  AlignmentResult result;
  result.max_delay_frames = max_delay_frames;
  result.score_curve.resize(2 * max_delay_frames + 1);
  for (int tau = -max_delay_frames; tau <= max_delay_frames; ++tau) {
    const Index row = ((tau % frames) + frames) % frames;
    result.score_curve[tau + max_delay_frames] = summed[row];
  }

  // Visit candidates by increasing |tau|, negative first, and keep the first
  // strict maximum; that realizes the tie-break order.
  int best = 0;
  double best_score = result.score_at(0);
  for (int mag = 1; mag <= max_delay_frames; ++mag) {
    for (int tau : {-mag, mag}) {
      if (result.score_at(tau) > best_score) {
        best_score = result.score_at(tau);
        best = tau;
      }
    }
  }
  result.frame_delay = best;

  if (close_spec.frames() < frames) {
    close_spec.bins.conservativeResizeLike(Eigen::MatrixXcd::Zero(frames, close_spec.freqs()));
  }
  result.aligned_signal = istft(shift_frames(close_spec, best), array_ref.size());
  return result;
}

}  // namespace maskloc
