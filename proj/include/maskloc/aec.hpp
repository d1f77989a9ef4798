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

namespace maskloc {

/// Kalman echo-canceller hyperparameters. The process noise covariance is
/// process_noise^2 * I and the initial state covariance initial_state_cov * I.
struct AecConfig {
  Index num_taps = 256;
  double process_noise = 1e-4;
  double initial_state_cov = 1e-2;
  // Lower bound applied to the innovation variance before inversion.
  double innovation_floor = 1e-10;

  void validate() const;
};

/// Filter state: FIR estimate, its covariance, and the close-talk history
/// (history[0] is the most recent sample).
struct AecState {
  Eigen::VectorXd state_mean;
  Eigen::MatrixXd state_cov;
  Eigen::VectorXd history;

  static AecState initial(const AecConfig& config);
  void validate() const;
};

struct AecSample {
  double noise = 0.0;  // post-fit residual
  double echo = 0.0;   // reference minus residual
};

/// Sample-rate Kalman filter identifying the FIR path from the aligned
/// close-talk signal into one array channel.
///
/// Keeps only the lower triangle of the covariance and an amortized sliding
/// history buffer so that each step is allocation-free and O(D^2).
class KalmanEchoCanceller {
 public:
  explicit KalmanEchoCanceller(const AecConfig& config);
  KalmanEchoCanceller(const AecConfig& config, const AecState& state);

  AecSample step(double ref_sample, double close_sample);

  AecState state() const;
  const Eigen::VectorXd& coefficients() const { return mean_; }

 private:
  AecConfig config_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;  // lower triangle is authoritative
  Eigen::VectorXd buffer_;
  Index head_ = 0;
  Eigen::VectorXd gain_;
};

struct AecStepResult {
  AecState state;
  double noise = 0.0;
  double echo = 0.0;
};

/// One predict/update cycle on a value-semantic state: push the close-talk
/// sample into the history, then predict with identity transition, compute
/// the pre-fit residual, gain, update and the post-fit residual.
/// Throws InvalidArgumentError on non-finite samples.
AecStepResult aec_step(const AecState& state, const AecConfig& config, double ref_sample, double close_sample);

struct AecOutput {
  TimeSignal noise_estimate;
  TimeSignal echo_estimate;
  AecState final_state;
};

// Folds the filter over both signals from the zero state.
AecOutput run_aec(const TimeSignal& array_ref, const TimeSignal& aligned_close, const AecConfig& config);
AecOutput run_aec(const TimeSignal& array_ref, const TimeSignal& aligned_close, const AecConfig& config,
                  const AecState& initial);

/// Echo return loss enhancement over samples [from, end): input-to-residual
/// energy ratio in dB.
double erle_db(const TimeSignal& input, const TimeSignal& residual, Index from = 0);

}  // namespace maskloc
