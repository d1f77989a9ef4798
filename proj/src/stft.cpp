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

#include "maskloc/stft.hpp"

#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace maskloc {

void StftConfig::validate() const {
  if (frame_size <= 0 || frame_size % 2 != 0)
    throw InvalidArgumentError("frame size must be positive and even");
  if (hop_size <= 0 || hop_size > frame_size)
    throw InvalidArgumentError("hop size must be in (0, frame_size]");
}

Eigen::VectorXd analysis_window(const StftConfig& config) {
  config.validate();
  const Index n = config.frame_size;
  Eigen::VectorXd w(n);
  for (Index i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

Eigen::VectorXd overlap_envelope(const StftConfig& config) {
  const Eigen::VectorXd w = analysis_window(config);
  const Index hop = config.hop_size;
  Eigen::VectorXd env = Eigen::VectorXd::Zero(hop);
  for (Index i = 0; i < config.frame_size; ++i) env[i % hop] += w[i] * w[i];
  return env;
}

Spectrogram stft(const TimeSignal& signal, const StftConfig& config) {
  config.validate();
  const Index n = config.frame_size;
  if (signal.size() < n)
    throw InsufficientDataError("signal has " + std::to_string(signal.size()) +
                                " samples, fewer than one frame of " + std::to_string(n));

  const Eigen::VectorXd w = analysis_window(config);
  const Index frames = config.num_frames(signal.size());
  const Index bins = config.num_bins();

  Spectrogram spec;
  spec.config = config;
  spec.sample_rate = signal.sample_rate;
  spec.bins.resize(frames, bins);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(n);
  std::vector<std::complex<double>> out;
  for (Index l = 0; l < frames; ++l) {
    const Index start = l * config.hop_size;
    for (Index i = 0; i < n; ++i) {
      const Index k = start + i;
      frame[i] = k < signal.size() ? signal.samples[k] * w[i] : 0.0;
    }
    fft.fwd(out, frame);
    for (Index f = 0; f < bins; ++f) spec.bins(l, f) = out[f];
  }
  return spec;
}

TimeSignal istft(const Spectrogram& spec, std::optional<Index> length) {
  const StftConfig& config = spec.config;
  config.validate();
  if (spec.freqs() != config.num_bins())
    throw ShapeMismatchError("spectrogram has " + std::to_string(spec.freqs()) + " bins, expected " +
                             std::to_string(config.num_bins()));

  const Eigen::VectorXd steady = overlap_envelope(config);
  if (steady.minCoeff() <= 1e-12 * steady.maxCoeff())
    throw InvalidArgumentError("window/hop combination does not satisfy the overlap-add condition");

  const Index n = config.frame_size;
  const Index frames = spec.frames();
  const Index total = config.synthesis_length(frames);
  const Eigen::VectorXd w = analysis_window(config);

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(total);
  Eigen::VectorXd env = Eigen::VectorXd::Zero(total);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> half(config.num_bins());
  std::vector<double> frame;
  for (Index l = 0; l < frames; ++l) {
    for (Index f = 0; f < config.num_bins(); ++f) half[f] = spec.bins(l, f);
    fft.inv(frame, half, n);
    const Index start = l * config.hop_size;
    for (Index i = 0; i < n; ++i) {
      acc[start + i] += w[i] * frame[i];
      env[start + i] += w[i] * w[i];
    }
  }

  // Edge samples see only part of the overlap; floor the normalizer there
  // rather than amplifying numerical noise.
  const double floor = 1e-8 * steady.maxCoeff();
  for (Index i = 0; i < total; ++i) acc[i] = env[i] > floor ? acc[i] / env[i] : 0.0;

  TimeSignal out(std::move(acc), spec.sample_rate);
  if (length) out.samples.conservativeResizeLike(Eigen::VectorXd::Zero(*length));
  return out;
}

Eigen::MatrixXd magnitude_compress(const Spectrogram& spec, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgumentError("beta must lie in [0, 1]");
  return compress_magnitude(spec.bins, beta);
}

}  // namespace maskloc
