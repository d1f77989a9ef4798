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

#include "maskloc/pipeline.hpp"

#include <cmath>

namespace maskloc {

void PipelineConfig::validate() const {
  if (!(sample_rate > 0.0)) throw InvalidArgumentError("sample rate must be positive");
  stft.validate();
  aec.validate();
  geometry.validate();
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgumentError("beta must lie in [0, 1]");
  if (!(alpha >= 0.0)) throw InvalidArgumentError("alpha must be nonnegative");
  if (!(grid_deg > 0.0)) throw InvalidArgumentError("grid resolution must be positive");
  if (!(loading_rel >= 0.0)) throw InvalidArgumentError("diagonal loading must be nonnegative");
  if (!(max_delay_s >= 0.0)) throw InvalidArgumentError("maximum alignment delay must be nonnegative");
  if (aec_passes < 1) throw InvalidArgumentError("at least one echo-cancellation pass is required");
  if (reference_channel < 0 || reference_channel >= geometry.size())
    throw InvalidArgumentError("reference channel is outside the array");
}

FrontEnd run_front_end(const MultichannelSignal& array, const TimeSignal& close, const PipelineConfig& config) {
  config.validate();
  array.validate();
  close.validate();
  if (array.num_channels() != config.geometry.size())
    throw ShapeMismatchError("array recording has " + std::to_string(array.num_channels()) +
                             " channels but the geometry expects " + std::to_string(config.geometry.size()));
  if (array.sample_rate != config.sample_rate || close.sample_rate != config.sample_rate)
    throw InvalidArgumentError("recording sample rates do not match the configured rate");

  FrontEnd front;
  const TimeSignal reference = array.channel(config.reference_channel);

  // Keep the circular search unambiguous: at most half the frames each way.
  const Index frames = config.stft.num_frames(std::max(reference.size(), close.size()));
  const auto configured = static_cast<Index>(std::floor(config.max_delay_s * config.sample_rate /
                                                        static_cast<double>(config.stft.hop_size)));
  const int max_delay = static_cast<int>(std::max<Index>(0, std::min(configured, (frames - 1) / 2)));
  front.alignment = coarse_align(reference, close, config.stft, config.beta, max_delay);

  const Index lookahead = config.effective_lookahead();
  const Index n = reference.size();
  TimeSignal advanced = TimeSignal::zeros(n, reference.sample_rate);
  if (lookahead < n) advanced.samples.head(n - lookahead) = front.alignment.aligned_signal.samples.tail(n - lookahead);

  front.aec = run_aec(reference, advanced, config.aec);
  for (int pass = 1; pass < config.aec_passes; ++pass) {
    AecState warm = front.aec.final_state;
    warm.history.setZero();
    front.aec = run_aec(reference, advanced, config.aec, warm);
  }
  front.erle_db = erle_db(reference, front.aec.noise_estimate, n / 2);

  front.speech_spec = stft(front.aec.echo_estimate, config.stft);
  front.noise_spec = stft(front.aec.noise_estimate, config.stft);
  front.array_spec.reserve(static_cast<size_t>(array.num_channels()));
  for (Index m = 0; m < array.num_channels(); ++m) front.array_spec.push_back(stft(array.channel(m), config.stft));
  return front;
}

RatioMask mask_for(const FrontEnd& front, MaskKind kind, const PipelineConfig& config) {
  return compute_mask(kind, front.speech_spec, front.noise_spec, config.alpha);
}

DoaResult localize_with_mask(const FrontEnd& front, const RatioMask& mask, const PipelineConfig& config) {
  const ScmPair scms = compute_scms(front.array_spec, mask, config.loading_rel);
  const ComplexMatrices whitened = whiten(scms);
  return srp_phat_scan(whitened, config.geometry, DoaGrid::azimuth_ring(config.grid_deg), config.stft,
                       config.sample_rate, config.band);
}

LocalizeResult localize(const MultichannelSignal& array, const TimeSignal& close, const PipelineConfig& config) {
  const FrontEnd front = run_front_end(array, close, config);
  LocalizeResult out;
  out.mask = mask_for(front, config.mask_kind, config);
  out.doa = localize_with_mask(front, out.mask, config);
  out.frame_delay = front.alignment.frame_delay;
  out.erle_db = front.erle_db;
  return out;
}

}  // namespace maskloc
