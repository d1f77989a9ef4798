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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace maskloc {

using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input too short for the requested analysis (e.g. less than one frame).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A linear system could not be solved reliably.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Mono sampled audio. Amplitudes are dimensionless, nominally in [-1, 1].
struct TimeSignal {
  Eigen::VectorXd samples;
  double sample_rate = 16000.0;

  TimeSignal() = default;
  TimeSignal(Eigen::VectorXd s, double fs) : samples(std::move(s)), sample_rate(fs) {}

  static TimeSignal zeros(Index length, double fs) {
    return TimeSignal(Eigen::VectorXd::Zero(length), fs);
  }

  Index size() const { return samples.size(); }
  double duration() const { return static_cast<double>(size()) / sample_rate; }

  void validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
      throw InvalidArgumentError("sample rate must be positive");
    if (!samples.allFinite()) throw InvalidArgumentError("signal contains non-finite samples");
  }
};

/// M synchronized channels stored column-wise (samples x channels).
struct MultichannelSignal {
  Eigen::MatrixXd samples;
  double sample_rate = 16000.0;

  MultichannelSignal() = default;
  MultichannelSignal(Eigen::MatrixXd s, double fs) : samples(std::move(s)), sample_rate(fs) {}

  Index num_channels() const { return samples.cols(); }
  Index size() const { return samples.rows(); }

  TimeSignal channel(Index m) const { return TimeSignal(samples.col(m), sample_rate); }

  void validate() const {
    if (samples.cols() < 1) throw InvalidArgumentError("multichannel signal needs at least one channel");
    if (!(sample_rate > 0.0)) throw InvalidArgumentError("sample rate must be positive");
    if (!samples.allFinite()) throw InvalidArgumentError("signal contains non-finite samples");
  }
};

// 10*log10(a/b) with both energies floored to avoid -inf in silent cases.
inline double energy_ratio_db(double numerator, double denominator) {
  constexpr double kFloor = 1e-300;
  return 10.0 * std::log10(std::max(numerator, kFloor) / std::max(denominator, kFloor));
}

}  // namespace maskloc
