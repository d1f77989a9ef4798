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

#include <gtest/gtest.h>

#include "maskloc/scene.hpp"
#include "test_util.hpp"

namespace maskloc {
namespace {

Spectrogram envelope_spec(const Eigen::MatrixXd& magnitudes) {
  Spectrogram s;
  s.bins = magnitudes.cast<std::complex<double>>();
  s.config = StftConfig{8, 2};
  return s;
}

// r[tau, f] = sum_k e^{j 2 pi tau k / L} * PHAT-normalized cross spectrum,
// evaluated with explicit DFT sums over the frame axis.
Eigen::MatrixXd direct_xcorr(const Eigen::MatrixXd& ref_env, const Eigen::MatrixXd& close_env) {
  const Index frames = ref_env.rows();
  const Index bins = ref_env.cols();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(frames, bins);
  const double two_pi = 2.0 * std::numbers::pi;
  for (Index f = 0; f < bins; ++f) {
    std::vector<std::complex<double>> ru(frames), rc(frames);
    for (Index k = 0; k < frames; ++k) {
      for (Index l = 0; l < frames; ++l) {
        const auto e = std::polar(1.0, -two_pi * static_cast<double>(k * l) / static_cast<double>(frames));
        ru[k] += ref_env(l, f) * e;
        rc[k] += close_env(l, f) * e;
      }
    }
    for (Index tau = 0; tau < frames; ++tau) {
      std::complex<double> acc = 0.0;
      for (Index k = 0; k < frames; ++k) {
        const double den = std::abs(rc[k]) * std::abs(ru[k]);
        if (den > 1e-12)
          acc += rc[k] * std::conj(ru[k]) / den *
                 std::polar(1.0, two_pi * static_cast<double>(tau * k) / static_cast<double>(frames));
      }
      r(tau, f) = acc.real();
    }
  }
  return r;
}

int argmax_row(const Eigen::VectorXd& v) {
  Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

TEST(FrameXcorr, MatchesDirectCircularCorrelation) {
  const Index frames = 40, bins = 5;
  Eigen::MatrixXd env = testing::random_vector(frames * bins, 3).cwiseAbs().reshaped(frames, bins);
  Eigen::MatrixXd shifted(frames, bins);
  for (Index l = 0; l < frames; ++l) shifted.row(l) = env.row((l - 10 + frames) % frames);
  const Eigen::MatrixXd r = frame_xcorr_phat(envelope_spec(env), envelope_spec(shifted), 1.0);
  const Eigen::MatrixXd oracle = direct_xcorr(env, shifted);
  EXPECT_LT((r - oracle).cwiseAbs().maxCoeff(), 1e-9);
  for (Index f = 0; f < bins; ++f) EXPECT_EQ(argmax_row(r.col(f)), 10);
}

TEST(FrameXcorr, IdenticalEnvelopesPeakAtZero) {
  const Eigen::MatrixXd env = testing::random_vector(30 * 4, 8).cwiseAbs().reshaped(30, 4);
  const Eigen::MatrixXd r = frame_xcorr_phat(envelope_spec(env), envelope_spec(env), 0.25);
  for (Index f = 0; f < 4; ++f) EXPECT_EQ(argmax_row(r.col(f)), 0);
}

TEST(FrameXcorr, ZeroEnvelopeBinContributesNothing) {
  Eigen::MatrixXd env = testing::random_vector(20 * 3, 5).cwiseAbs().reshaped(20, 3);
  env.col(1).setZero();
  const Eigen::MatrixXd r = frame_xcorr_phat(envelope_spec(env), envelope_spec(env), 1.0);
  EXPECT_TRUE(r.allFinite());
  EXPECT_EQ(r.col(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FrameXcorr, RejectsMismatchedConfigs) {
  Spectrogram a = envelope_spec(Eigen::MatrixXd::Ones(10, 5));
  Spectrogram b = a;
  b.config.hop_size = 4;
  EXPECT_THROW(frame_xcorr_phat(a, b, 1.0), ShapeMismatchError);
}

TEST(FrameXcorr, IndependentNoisePeakRatioFarBelowShiftedCopy) {
  auto peak_ratio = [](const Eigen::MatrixXd& r) {
    const Eigen::VectorXd s = r.rowwise().sum();
    return s.maxCoeff() / s.cwiseAbs().mean();
  };
  const Index frames = 200, bins = 64;
  const Eigen::MatrixXd a = testing::random_vector(frames * bins, 21).cwiseAbs().reshaped(frames, bins);
  const Eigen::MatrixXd b = testing::random_vector(frames * bins, 22).cwiseAbs().reshaped(frames, bins);
  Eigen::MatrixXd shifted(frames, bins);
  for (Index l = 0; l < frames; ++l) shifted.row(l) = a.row((l - 7 + frames) % frames);
  const double independent = peak_ratio(frame_xcorr_phat(envelope_spec(a), envelope_spec(b), 0.25));
  const double copy = peak_ratio(frame_xcorr_phat(envelope_spec(a), envelope_spec(shifted), 0.25));
  EXPECT_GT(copy, 10.0 * independent);
}

TEST(ShiftFrames, AdvancesAndZeroFills) {
  Spectrogram s = envelope_spec(Eigen::VectorXd::LinSpaced(6, 1, 6));
  const Spectrogram ahead = shift_frames(s, 2);
  EXPECT_EQ(ahead.bins(0, 0).real(), 3.0);
  EXPECT_EQ(ahead.bins(3, 0).real(), 6.0);
  EXPECT_EQ(ahead.bins(4, 0).real(), 0.0);
  const Spectrogram behind = shift_frames(s, -1);
  EXPECT_EQ(behind.bins(0, 0).real(), 0.0);
  EXPECT_EQ(behind.bins(1, 0).real(), 1.0);
}

class CoarseAlign : public ::testing::Test {
 protected:
  static TimeSignal delayed(const TimeSignal& x, Index d) {
    TimeSignal out = TimeSignal::zeros(x.size(), x.sample_rate);
    if (d >= 0) out.samples.tail(x.size() - d) = x.samples.head(x.size() - d);
    else out.samples.head(x.size() + d) = x.samples.tail(x.size() + d);
    return out;
  }
  const StftConfig cfg_;
  const TimeSignal speech_ = synth_speech_like(3.0, 42);
};

TEST_F(CoarseAlign, RecoversExactTenFrameDelay) {
  const TimeSignal close = delayed(speech_, 10 * cfg_.hop_size);
  const AlignmentResult r = coarse_align(speech_, close, cfg_, 0.25, 100);
  EXPECT_EQ(r.frame_delay, 10);
  Index best = 0;
  r.score_curve.maxCoeff(&best);
  EXPECT_EQ(static_cast<int>(best) - r.max_delay_frames, r.frame_delay);
  EXPECT_EQ(r.aligned_signal.size(), speech_.size());
  EXPECT_EQ(r.aligned_signal.sample_rate, speech_.sample_rate);

  const Index edge = cfg_.frame_size;
  const Index len = speech_.size() - 2 * edge - 10 * cfg_.hop_size;
  const double err = testing::relative_error(r.aligned_signal.samples.segment(edge, len), speech_.samples.segment(edge, len));
  EXPECT_LT(err, 1e-3);
}

TEST_F(CoarseAlign, NoDelayGivesZero) {
  EXPECT_EQ(coarse_align(speech_, speech_, cfg_, 0.25, 100).frame_delay, 0);
}

TEST_F(CoarseAlign, ShiftEquivariantAndGainInvariant) {
  const Index base = 3 * cfg_.hop_size + 17;
  const int tau0 = coarse_align(speech_, delayed(speech_, base), cfg_, 0.25, 100).frame_delay;
  for (int k : {-12, -5, 4, 9}) {
    const TimeSignal close = delayed(speech_, base + k * cfg_.hop_size);
    EXPECT_EQ(coarse_align(speech_, close, cfg_, 0.25, 100).frame_delay, tau0 + k);
  }
  const TimeSignal close = delayed(speech_, base);
  const TimeSignal loud(close.samples * 7.0, close.sample_rate);
  const TimeSignal quiet(speech_.samples * 0.01, speech_.sample_rate);
  EXPECT_EQ(coarse_align(speech_, loud, cfg_, 0.25, 100).frame_delay, tau0);
  EXPECT_EQ(coarse_align(quiet, close, cfg_, 0.25, 100).frame_delay, tau0);
}

TEST_F(CoarseAlign, NoisyDelayRecoveredInMostTrials) {
  int hits = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const TimeSignal s = synth_speech_like(3.0, 1000 + t);
    SceneSpec spec;
    spec.geometry = ArrayGeometry::circular(2, 0.1);
    spec.target_azimuth_deg = 0.0;
    spec.snr_db = 5.0;
    spec.seed = static_cast<std::uint64_t>(t);
    spec.wireless_delay_samples = 37 * cfg_.hop_size;
    const RenderedScene scene = render_scene(spec, s);
    hits += coarse_align(scene.array.channel(0), scene.close, cfg_, 0.25, 150).frame_delay == 37;
  }
  EXPECT_GE(hits, 95);
}

TEST_F(CoarseAlign, TieBreakPrefersSmallestMagnitudeThenNegative) {
  const TimeSignal silent = TimeSignal::zeros(4000, 16000);
  const AlignmentResult r = coarse_align(silent, silent, cfg_, 0.25, 5);
  EXPECT_EQ(r.frame_delay, 0);
  EXPECT_EQ(r.score_curve.size(), 11);
}

TEST_F(CoarseAlign, Errors) {
  EXPECT_THROW(coarse_align(TimeSignal::zeros(100, 16000), speech_, cfg_, 0.25, 5), InsufficientDataError);
  EXPECT_THROW(coarse_align(speech_, TimeSignal(speech_.samples, 8000), cfg_, 0.25, 5), InvalidArgumentError);
  EXPECT_THROW(coarse_align(speech_, speech_, cfg_, 0.25, 10000), InvalidArgumentError);
}

}  // namespace
}  // namespace maskloc
