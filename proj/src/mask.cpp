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

#include "maskloc/mask.hpp"

#include <algorithm>
#include <cctype>

namespace maskloc {

std::string to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::None:
      return "none";
    case MaskKind::Irm:
      return "irm";
    case MaskKind::IrmStar:
      return "irm-star";
  }
  return "unknown";
}

MaskKind parse_mask_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "none" || s == "ones") return MaskKind::None;
  if (s == "irm") return MaskKind::Irm;
  if (s == "irm-star" || s == "irm*" || s == "irm_star" || s == "irmstar") return MaskKind::IrmStar;
  throw InvalidArgumentError("unknown mask kind '" + std::string(text) + "' (expected none, irm or irm-star)");
}

namespace {

void require_same_shape(const Spectrogram& a, const Spectrogram& b) {
  if (a.frames() != b.frames() || a.freqs() != b.freqs())
    throw ShapeMismatchError("speech and noise spectrograms differ in shape (" + std::to_string(a.frames()) + "x" +
                             std::to_string(a.freqs()) + " vs " + std::to_string(b.frames()) + "x" +
                             std::to_string(b.freqs()) + ")");
}

Eigen::MatrixXd ratio(const Eigen::MatrixXd& speech_power, const Eigen::MatrixXd& denominator) {
  return speech_power.binaryExpr(denominator, [](double num, double den) { return den > 0.0 ? num / den : 0.0; });
}

}  // namespace

RatioMask compute_irm(const Spectrogram& speech_spec, const Spectrogram& noise_spec) {
  require_same_shape(speech_spec, noise_spec);
  const Eigen::MatrixXd x2 = speech_spec.bins.cwiseAbs2();
  const Eigen::MatrixXd b2 = noise_spec.bins.cwiseAbs2();
  return {ratio(x2, x2 + b2), MaskKind::Irm, 0.0};
}

RatioMask compute_irm_star(const Spectrogram& speech_spec, const Spectrogram& noise_spec, double alpha) {
  require_same_shape(speech_spec, noise_spec);
  if (!(alpha >= 0.0)) throw InvalidArgumentError("alpha must be nonnegative");
  const Eigen::MatrixXd x2 = speech_spec.bins.cwiseAbs2();
  const Eigen::MatrixXd b2 = noise_spec.bins.cwiseAbs2();
  const Index frames = b2.rows();
  const Eigen::RowVectorXd floor =
      frames > 0 ? Eigen::RowVectorXd(alpha * b2.colwise().mean()) : Eigen::RowVectorXd::Zero(b2.cols());
  Eigen::MatrixXd den = x2 + b2;
  den.rowwise() += floor;
  return {ratio(x2, den), MaskKind::IrmStar, alpha};
}

RatioMask ones_mask(Index frames, Index bins) { return {Eigen::MatrixXd::Ones(frames, bins), MaskKind::None, 0.0}; }

RatioMask compute_mask(MaskKind kind, const Spectrogram& speech_spec, const Spectrogram& noise_spec, double alpha) {
  switch (kind) {
    case MaskKind::None:
      require_same_shape(speech_spec, noise_spec);
      return ones_mask(speech_spec.frames(), speech_spec.freqs());
    case MaskKind::Irm:
      return compute_irm(speech_spec, noise_spec);
    case MaskKind::IrmStar:
      return compute_irm_star(speech_spec, noise_spec, alpha);
  }
  throw InvalidArgumentError("unknown mask kind");
}

}  // namespace maskloc
