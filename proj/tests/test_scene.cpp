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

#include "maskloc/scene.hpp"

#include <gtest/gtest.h>

#include "maskloc/alignment.hpp"
#include "test_util.hpp"

namespace maskloc {
namespace {

double power(const Eigen::MatrixXd& m) { return m.squaredNorm() / static_cast<double>(m.size()); }

// Lag of b relative to a at the cross-correlation peak, refined by a parabola.
double peak_lag(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Index max_lag) {
  Eigen::VectorXd r(2 * max_lag + 1);
  const Index n = a.size();
  for (Index lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (Index i = std::max<Index>(0, -lag); i < std::min(n, n - lag); ++i) acc += a[i] * b[i + lag];
    r[lag + max_lag] = acc;
  }
  Index k = 0;
  r.maxCoeff(&k);
  double offset = 0.0;
  if (k > 0 && k < r.size() - 1) offset = 0.5 * (r[k - 1] - r[k + 1]) / (r[k - 1] - 2.0 * r[k] + r[k + 1]);
  return static_cast<double>(k - max_lag) + offset;
}

ArrayGeometry pair_on_y(double half_spacing) {
  ArrayGeometry g;
  g.positions.resize(3, 2);
  g.positions << 0, 0, half_spacing, -half_spacing, 0, 0;
  return g;
}

TEST(FractionalDelay, IntegerDelaysAreExactShifts) {
  const Eigen::VectorXd x = testing::random_vector(200, 1);
  const Eigen::VectorXd y = fractional_delay(x, 5.0);
  EXPECT_LT((y.tail(195) - x.head(195)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(y.head(5).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::VectorXd z = fractional_delay(x, -3.0);
  EXPECT_LT((z.head(197) - x.tail(197)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((fractional_delay(x, 0.0) - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FractionalDelay, HalfSampleDelayOfSlowSinusoid) {
  Eigen::VectorXd x(2000);
  const double w = 2.0 * std::numbers::pi * 300.0 / 16000.0;
  for (Index i = 0; i < 2000; ++i) x[i] = std::sin(w * static_cast<double>(i));
  const Eigen::VectorXd y = fractional_delay(x, 0.5);
  for (Index i = 100; i < 1900; ++i) ASSERT_NEAR(y[i], std::sin(w * (static_cast<double>(i) - 0.5)), 1e-3);
}

TEST(Scene, BroadsideSourceReachesBothMicsTogether) {
  SceneSpec spec;
  spec.geometry = pair_on_y(0.1);
  spec.target_azimuth_deg = 0.0;
  const RenderedScene s = render_scene(spec, synth_speech_like(0.5, 1));
  EXPECT_LT((s.array.samples.col(0) - s.array.samples.col(1)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(s.truth_azimuth_deg, 0.0);
}

TEST(Scene, EndfireDelayMatchesGeometry) {
  SceneSpec spec;
  spec.geometry = pair_on_y(0.516);
  spec.target_azimuth_deg = 90.0;
  const RenderedScene s = render_scene(spec, synth_speech_like(1.0, 2));
  const double expected = 2.0 * 0.516 / 343.0 * 16000.0;
  EXPECT_NEAR(expected, 48.1, 0.05);
  EXPECT_NEAR(peak_lag(s.array.samples.col(0), s.array.samples.col(1), 80), expected, 0.5);
}

TEST(Scene, ZeroDbInterfererOnlyMatchesTargetPower) {
  SceneSpec spec;
  spec.geometry = ArrayGeometry::circular(4, 0.2);
  spec.target_azimuth_deg = 10.0;
  spec.interferer_azimuth_deg = 200.0;
  spec.snr_db = 0.0;
  spec.white_noise = false;
  spec.snr_span = SceneSpec::SnrSpan::WholeRecording;
  const RenderedScene s = render_scene(spec, synth_speech_like(1.0, 3), synth_speech_like(1.0, 4));
  EXPECT_NEAR(energy_ratio_db(power(s.components.target), power(s.components.interferer)), 0.0, 0.1);
  EXPECT_EQ(s.components.noise.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((s.array.samples - s.components.target - s.components.interferer).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Scene, SnrCalibratedOverTargetSpan) {
  const TimeSignal dry = synth_speech_like(2.0, 5);
  TimeSignal padded = TimeSignal::zeros(dry.size() + 16000, 16000);
  padded.samples.segment(8000, dry.size()) = dry.samples;
  for (double snr : {-5.0, 1.0, 5.0, 10.0, 20.0}) {
    SceneSpec spec;
    spec.geometry = ArrayGeometry::circular(4, 0.2);
    spec.interferer_azimuth_deg = 120.0;
    spec.snr_db = snr;
    spec.seed = 7;
    const RenderedScene s = render_scene(spec, padded, synth_speech_like(3.0, 6));
    Index begin = 0, end = padded.size();
    while (padded.samples[begin] == 0.0) ++begin;
    while (padded.samples[end - 1] == 0.0) --end;
    const Eigen::MatrixXd target = s.components.target.middleRows(begin, end - begin);
    const Eigen::MatrixXd rest =
        (s.components.interferer + s.components.noise).middleRows(begin, end - begin);
    EXPECT_NEAR(energy_ratio_db(power(target), power(rest)), snr, 0.2);
    const double inr = energy_ratio_db(power(s.components.interferer.middleRows(begin, end - begin)),
                                       power(s.components.noise.middleRows(begin, end - begin)));
    EXPECT_NEAR(inr, 10.0, 0.2);
  }
}

TEST(Scene, CleanSceneHasNoInterference) {
  SceneSpec spec;
  spec.geometry = ArrayGeometry::circular(4, 0.2);
  const RenderedScene s = render_scene(spec, synth_speech_like(0.5, 1));
  EXPECT_EQ(s.components.noise.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.components.interferer.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Scene, DeterministicInSeed) {
  SceneSpec spec;
  spec.geometry = ArrayGeometry::circular(4, 0.2);
  spec.snr_db = 3.0;
  spec.seed = 99;
  const TimeSignal dry = synth_speech_like(0.5, 8);
  const RenderedScene a = render_scene(spec, dry);
  const RenderedScene b = render_scene(spec, dry);
  EXPECT_EQ(a.array.samples, b.array.samples);
  spec.seed = 100;
  EXPECT_NE(render_scene(spec, dry).array.samples, a.array.samples);
}

TEST(Scene, CloseChannelIsDelayedFilteredTarget) {
  SceneSpec spec;
  spec.geometry = ArrayGeometry::circular(4, 0.2);
  spec.snr_db = 0.0;
  spec.wireless_delay_samples = 300;
  spec.close_ir = Eigen::Vector2d(0.5, 0.25);
  const TimeSignal dry = synth_speech_like(0.5, 9);
  const RenderedScene s = render_scene(spec, dry);
  ASSERT_EQ(s.close.size(), dry.size());
  EXPECT_EQ(s.close.samples.head(300).cwiseAbs().maxCoeff(), 0.0);
  for (Index i = 301; i < dry.size(); ++i)
    ASSERT_NEAR(s.close.samples[i], 0.5 * dry.samples[i - 300] + 0.25 * dry.samples[i - 301], 1e-15);
}

TEST(Scene, WirelessDelayRecoveredWithinHalfHop) {
  const StftConfig cfg;
  for (Index delay : {0, 500, 1000, 2345, 5000}) {
    SceneSpec spec;
    spec.geometry = ArrayGeometry::circular(4, 0.2);
    spec.target_azimuth_deg = 45.0;
    spec.snr_db = 10.0;
    spec.wireless_delay_samples = delay;
    const RenderedScene s = render_scene(spec, synth_speech_like(3.0, 10));
    const AlignmentResult r = coarse_align(s.array.channel(0), s.close, cfg, 0.25, 100);
    EXPECT_LE(std::abs(r.frame_delay * cfg.hop_size - delay), cfg.hop_size / 2) << "delay " << delay;
  }
}

TEST(Scene, Errors) {
  SceneSpec spec;
  EXPECT_THROW(render_scene(spec, TimeSignal::zeros(100, 8000)), InvalidArgumentError);
  spec.target_azimuth_deg = 360.0;
  EXPECT_THROW(render_scene(spec, TimeSignal::zeros(100, 16000)), InvalidArgumentError);
  spec.target_azimuth_deg = 0.0;
  spec.interferer_azimuth_deg = 10.0;
  EXPECT_THROW(render_scene(spec, TimeSignal::zeros(100, 16000)), InvalidArgumentError);
  spec.interferer_azimuth_deg.reset();
  spec.wireless_delay_samples = -1;
  EXPECT_THROW(render_scene(spec, TimeSignal::zeros(100, 16000)), InvalidArgumentError);
}

TEST(SpeechLike, DeterministicNormalizedAndModulated) {
  const TimeSignal a = synth_speech_like(2.0, 1);
  EXPECT_EQ(a.size(), 32000);
  EXPECT_EQ(a.samples, synth_speech_like(2.0, 1).samples);
  EXPECT_NEAR(std::sqrt(a.samples.squaredNorm() / 32000.0), 0.1, 1e-12);

  const Index win = 800;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Index start = 0; start + win <= a.size(); start += win) {
    const double e = a.samples.segment(start, win).squaredNorm() / static_cast<double>(win);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  EXPECT_GE(energy_ratio_db(hi, std::max(lo, 1e-20)), 6.0);
}

TEST(SpeechLike, SeedsAreUncorrelated) {
  const Eigen::VectorXd a = synth_speech_like(1.0, 21).samples;
  for (std::uint64_t seed : {22, 23, 24}) {
    const Eigen::VectorXd b = synth_speech_like(1.0, seed).samples;
    double peak = 0.0;
    for (Index lag = -800; lag <= 800; ++lag) {
      const Index n = a.size() - std::abs(lag);
      const double c = lag >= 0 ? a.head(n).dot(b.tail(n)) : a.tail(n).dot(b.head(n));
      peak = std::max(peak, std::abs(c));
    }
    EXPECT_LT(peak / (a.norm() * b.norm()), 0.2);
  }
  EXPECT_THROW(synth_speech_like(0.0, 1), InvalidArgumentError);
}

}  // namespace
}  // namespace maskloc
