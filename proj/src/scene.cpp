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

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace maskloc {

namespace {

constexpr int kSincHalfWidth = 16;
constexpr double kKaiserBeta = 8.6;

double kaiser_sinc(double t) {
  const double u = t / kSincHalfWidth;
  if (std::abs(u) >= 1.0) return 0.0;
  const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - u * u)) / std::cyl_bessel_i(0.0, kKaiserBeta);
  const double x = std::numbers::pi * t;
  const double sinc = std::abs(t) < 1e-12 ? 1.0 : std::sin(x) / x;
  return sinc * window;
}

double mean_power(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.squaredNorm() / static_cast<double>(m.size()); }

Eigen::Vector3d unit_from_azimuth(double azimuth_deg) {
  const double az = azimuth_deg * std::numbers::pi / 180.0;
  return {std::cos(az), std::sin(az), 0.0};
}

// Renders one point source on every microphone.
Eigen::MatrixXd propagate(const SceneSpec& spec, const Eigen::VectorXd& dry, double azimuth_deg, double distance_m) {
  const ArrayGeometry& g = spec.geometry;
  const Eigen::Vector3d dir = unit_from_azimuth(azimuth_deg);
  const double samples_per_meter = spec.sample_rate / g.speed_of_sound;
  Eigen::MatrixXd out(dry.size(), g.size());
  for (Index m = 0; m < g.size(); ++m) {
    const Eigen::Vector3d mic = g.positions.col(m);
    if (spec.spherical_wave) {
      const double dist = (distance_m * dir - mic).norm();
      out.col(m) = (distance_m / dist) * fractional_delay(dry, (dist - distance_m) * samples_per_meter);
    } else {
      out.col(m) = fractional_delay(dry, -mic.dot(dir) * samples_per_meter);
    }
  }
  return out;
}

Eigen::VectorXd fit_length(const Eigen::VectorXd& x, Index n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const Index k = std::min(n, x.size());
  out.head(k) = x.head(k);
  return out;
}

}  // namespace

void SceneSpec::validate() const {
  geometry.validate();
  if (!(sample_rate > 0.0)) throw InvalidArgumentError("scene sample rate must be positive");
  auto check_azimuth = [](double az) {
    if (!(az >= 0.0 && az < 360.0)) throw InvalidArgumentError("azimuths must lie in [0, 360)");
  };
  check_azimuth(target_azimuth_deg);
  if (interferer_azimuth_deg) check_azimuth(*interferer_azimuth_deg);
  if (snr_db && !std::isfinite(*snr_db)) throw InvalidArgumentError("SNR must be finite");
  if (wireless_delay_samples < 0) throw InvalidArgumentError("wireless delay must be nonnegative");
  if (spherical_wave && (!(target_distance_m > 0.0) || !(interferer_distance_m > 0.0)))
    throw InvalidArgumentError("source distances must be positive");
}

Eigen::VectorXd fractional_delay(const Eigen::VectorXd& x, double delay_samples) {
  const Index n = x.size();
  const double whole = std::floor(delay_samples);
  const double frac = delay_samples - whole;
  const auto shift = static_cast<Index>(whole);

  std::array<double, 2 * kSincHalfWidth> taps{};
  for (int j = -kSincHalfWidth + 1; j <= kSincHalfWidth; ++j)
    taps[static_cast<size_t>(j + kSincHalfWidth - 1)] = kaiser_sinc(static_cast<double>(j) - frac);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -kSincHalfWidth + 1; j <= kSincHalfWidth; ++j) {
      const Index k = i - shift - j;
      if (k >= 0 && k < n) acc += x[k] * taps[static_cast<size_t>(j + kSincHalfWidth - 1)];
    }
    y[i] = acc;
  }
  return y;
}

RenderedScene render_scene(const SceneSpec& spec, const TimeSignal& target_dry,
                           const std::optional<TimeSignal>& interferer_dry) {
  spec.validate();
  if (target_dry.sample_rate != spec.sample_rate)
    throw InvalidArgumentError("target signal sample rate does not match the scene");
  if (interferer_dry && interferer_dry->sample_rate != spec.sample_rate)
    throw InvalidArgumentError("interferer signal sample rate does not match the scene");
  if (spec.interferer_azimuth_deg && !interferer_dry)
    throw InvalidArgumentError("scene places an interferer but no interferer signal was given");

  const Index n = target_dry.size();
  const Index mics = spec.geometry.size();

  RenderedScene scene;
  scene.truth_azimuth_deg = spec.target_azimuth_deg;
  SceneComponents& c = scene.components;
  c.target = propagate(spec, target_dry.samples, spec.target_azimuth_deg, spec.target_distance_m);
  c.interferer = Eigen::MatrixXd::Zero(n, mics);
  c.noise = Eigen::MatrixXd::Zero(n, mics);

  Index span_begin = 0;
  Index span_end = n;
  if (spec.snr_span == SceneSpec::SnrSpan::TargetActive) {
    while (span_begin < n && target_dry.samples[span_begin] == 0.0) ++span_begin;
    while (span_end > span_begin && target_dry.samples[span_end - 1] == 0.0) --span_end;
  }
  auto span_power = [&](const Eigen::MatrixXd& m) {
    return span_end > span_begin ? mean_power(m.middleRows(span_begin, span_end - span_begin)) : 0.0;
  };

  const bool has_interferer = spec.interferer_azimuth_deg.has_value();
  if (spec.snr_db && (has_interferer || spec.white_noise)) {
    const double target_power = span_power(c.target);
    const double interference_power = target_power * std::pow(10.0, -*spec.snr_db / 10.0);
    double interferer_share = 0.0;
    if (has_interferer) {
      interferer_share =
          spec.white_noise ? 1.0 / (1.0 + std::pow(10.0, -spec.interferer_to_noise_db / 10.0)) : 1.0;
    }

    if (has_interferer) {
      c.interferer = propagate(spec, fit_length(interferer_dry->samples, n), *spec.interferer_azimuth_deg,
                               spec.interferer_distance_m);
      const double p = span_power(c.interferer);
      c.interferer *= p > 0.0 ? std::sqrt(interference_power * interferer_share / p) : 0.0;
    }
    if (spec.white_noise && interferer_share < 1.0) {
      std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
      std::normal_distribution<double> normal;
      for (Index m = 0; m < mics; ++m)
        for (Index i = 0; i < n; ++i) c.noise(i, m) = normal(rng);
      const double p = span_power(c.noise);
      c.noise *= std::sqrt(interference_power * (1.0 - interferer_share) / p);
    }
  }

  scene.array = MultichannelSignal(c.target + c.interferer + c.noise, spec.sample_rate);

  Eigen::VectorXd close = target_dry.samples;
  if (spec.close_ir) {
    const Eigen::VectorXd& h = *spec.close_ir;
    Eigen::VectorXd filtered = Eigen::VectorXd::Zero(n);
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < h.size() && k <= i; ++k) filtered[i] += h[k] * target_dry.samples[i - k];
    close = std::move(filtered);
  }
  Eigen::VectorXd delayed = Eigen::VectorXd::Zero(n);
  const Index d = spec.wireless_delay_samples;
  if (d < n) delayed.tail(n - d) = close.head(n - d);
  scene.close = TimeSignal(std::move(delayed), spec.sample_rate);
  return scene;
}

TimeSignal synth_speech_like(double duration_s, std::uint64_t seed, double sample_rate) {
  if (!(duration_s > 0.0) || !(sample_rate > 0.0))
    throw InvalidArgumentError("duration and sample rate must be positive");
  const auto n = static_cast<Index>(std::llround(duration_s * sample_rate));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const std::array<double, 3> base_formants = {500.0 + 300.0 * uniform(rng), 1100.0 + 800.0 * uniform(rng),
                                               2300.0 + 700.0 * uniform(rng)};
  const std::array<double, 3> formant_gain = {1.0, 0.6, 0.35};
  constexpr double kBandwidthHz = 120.0;
  constexpr double kBroadbandLevel = 0.15;

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  std::array<double, 3> y1{}, y2{};
  std::array<double, 3> a1{}, a2{};
  auto set_formants = [&](double jitter_scale) {
    for (size_t k = 0; k < 3; ++k) {
      const double fc = base_formants[k] * (1.0 + jitter_scale * (uniform(rng) - 0.5));
      const double r = std::exp(-std::numbers::pi * kBandwidthHz / sample_rate);
      a1[k] = 2.0 * r * std::cos(2.0 * std::numbers::pi * fc / sample_rate);
      a2[k] = -r * r;
    }
  };

  Index i = 0;
  while (i < n) {
    // One syllable of 150-350 ms followed, sometimes, by a pause.
    const auto syllable = static_cast<Index>((0.15 + 0.2 * uniform(rng)) * sample_rate);
    const double amplitude = 0.5 + 0.5 * uniform(rng);
    set_formants(0.3);
    for (Index k = 0; k < syllable && i < n; ++k, ++i) {
      const double e = normal(rng);
      double voiced = 0.0;
      for (size_t f = 0; f < 3; ++f) {
        const double y = e + a1[f] * y1[f] + a2[f] * y2[f];
        y2[f] = y1[f];
        y1[f] = y;
        voiced += formant_gain[f] * y;
      }
      const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(syllable));
      out[i] = amplitude * s * s * (0.05 * voiced + kBroadbandLevel * e);
    }
    if (uniform(rng) < 0.25) {
      const auto pause = static_cast<Index>((0.1 + 0.2 * uniform(rng)) * sample_rate);
      i += pause;
    }
  }

  const double rms = std::sqrt(out.squaredNorm() / static_cast<double>(std::max<Index>(n, 1)));
  if (rms > 0.0) out *= 0.1 / rms;
  return TimeSignal(std::move(out), sample_rate);
}

}  // namespace maskloc
