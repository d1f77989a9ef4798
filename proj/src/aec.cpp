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

#include "maskloc/aec.hpp"

#include <algorithm>

namespace maskloc {

namespace {

// Extra room in the history buffer; the window is slid back once per this
// many samples.
constexpr Index kHistorySlack = 4096;

}  // namespace

void AecConfig::validate() const {
  if (num_taps < 1) throw InvalidArgumentError("AEC needs at least one tap");
  if (!(process_noise > 0.0)) throw InvalidArgumentError("AEC process noise must be positive");
  if (!(initial_state_cov > 0.0)) throw InvalidArgumentError("AEC initial state covariance must be positive");
  if (!(innovation_floor > 0.0)) throw InvalidArgumentError("AEC innovation floor must be positive");
}

AecState AecState::initial(const AecConfig& config) {
  config.validate();
  AecState s;
  s.state_mean = Eigen::VectorXd::Zero(config.num_taps);
  s.state_cov = config.initial_state_cov * Eigen::MatrixXd::Identity(config.num_taps, config.num_taps);
  s.history = Eigen::VectorXd::Zero(config.num_taps);
  return s;
}

void AecState::validate() const {
  const Index d = state_mean.size();
  if (state_cov.rows() != d || state_cov.cols() != d || history.size() != d)
    throw ShapeMismatchError("AEC state dimensions are inconsistent");
  if (!state_mean.allFinite() || !state_cov.allFinite() || !history.allFinite())
    throw InvalidArgumentError("AEC state contains non-finite values");
}

KalmanEchoCanceller::KalmanEchoCanceller(const AecConfig& config)
    : KalmanEchoCanceller(config, AecState::initial(config)) {}

KalmanEchoCanceller::KalmanEchoCanceller(const AecConfig& config, const AecState& state) : config_(config) {
  config_.validate();
  state.validate();
  const Index d = config_.num_taps;
  if (state.state_mean.size() != d) throw ShapeMismatchError("AEC state does not match num_taps");
  mean_ = state.state_mean;
  cov_ = state.state_cov;
  // Newest sample sits at buffer_[head_]; the window is buffer_[head_, head_ + d).
  buffer_ = Eigen::VectorXd::Zero(d + kHistorySlack);
  head_ = kHistorySlack;
  buffer_.segment(head_, d) = state.history;
  gain_.resize(d);
}

AecSample KalmanEchoCanceller::step(double ref_sample, double close_sample) {
  if (!std::isfinite(ref_sample) || !std::isfinite(close_sample))
    throw InvalidArgumentError("non-finite sample fed to the echo canceller");
  const Index d = config_.num_taps;

  if (head_ == 0) {
    buffer_.segment(kHistorySlack + 1, d - 1) = buffer_.segment(0, d - 1).eval();
    head_ = kHistorySlack + 1;
  }
  --head_;
  buffer_[head_] = close_sample;
  const auto h = buffer_.segment(head_, d);

  // Predict: identity transition, additive process noise.
  cov_.diagonal().array() += config_.process_noise * config_.process_noise;

  const double prefit = ref_sample - h.dot(mean_);
  gain_.noalias() = cov_.selfadjointView<Eigen::Lower>() * h;  // P H^T
  const double s = std::max(h.dot(gain_) + prefit * prefit, config_.innovation_floor);

  mean_.noalias() += gain_ * (prefit / s);
  // (I - K H) P = P - (P H^T)(P H^T)^T / S for symmetric P.
  cov_.selfadjointView<Eigen::Lower>().rankUpdate(gain_, -1.0 / s);

  const double postfit = ref_sample - h.dot(mean_);
  return {postfit, ref_sample - postfit};
}

AecState KalmanEchoCanceller::state() const {
  AecState s;
  s.state_mean = mean_;
  s.state_cov = cov_.selfadjointView<Eigen::Lower>();
  s.history = buffer_.segment(head_, config_.num_taps);
  return s;
}

AecStepResult aec_step(const AecState& state, const AecConfig& config, double ref_sample, double close_sample) {
  KalmanEchoCanceller filter(config, state);
  const AecSample out = filter.step(ref_sample, close_sample);
  return {filter.state(), out.noise, out.echo};
}

AecOutput run_aec(const TimeSignal& array_ref, const TimeSignal& aligned_close, const AecConfig& config) {
  return run_aec(array_ref, aligned_close, config, AecState::initial(config));
}

AecOutput run_aec(const TimeSignal& array_ref, const TimeSignal& aligned_close, const AecConfig& config,
                  const AecState& initial) {
  if (array_ref.size() != aligned_close.size())
    throw ShapeMismatchError("AEC inputs differ in length (" + std::to_string(array_ref.size()) + " vs " +
                             std::to_string(aligned_close.size()) + ")");
  if (array_ref.sample_rate != aligned_close.sample_rate)
    throw InvalidArgumentError("AEC inputs differ in sample rate");

  KalmanEchoCanceller filter(config, initial);
  const Index n = array_ref.size();
  AecOutput out;
  out.noise_estimate = TimeSignal::zeros(n, array_ref.sample_rate);
  out.echo_estimate = TimeSignal::zeros(n, array_ref.sample_rate);
  for (Index i = 0; i < n; ++i) {
    const AecSample s = filter.step(array_ref.samples[i], aligned_close.samples[i]);
    out.noise_estimate.samples[i] = s.noise;
    out.echo_estimate.samples[i] = s.echo;
  }
  out.final_state = filter.state();
  return out;
}

double erle_db(const TimeSignal& input, const TimeSignal& residual, Index from) {
  if (input.size() != residual.size()) throw ShapeMismatchError("ERLE inputs differ in length");
  from = std::clamp<Index>(from, 0, input.size());
  const Index n = input.size() - from;
  return energy_ratio_db(input.samples.tail(n).squaredNorm(), residual.samples.tail(n).squaredNorm());
}

}  // namespace maskloc
