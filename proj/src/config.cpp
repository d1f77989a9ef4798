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

#include "maskloc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace maskloc {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw DataError("config key '" + key + "' expects a number, got '" + value + "'");
}

long long to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v)) throw DataError("config key '" + key + "' expects an integer, got '" + value + "'");
  return static_cast<long long>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DataError("config key '" + key + "' expects true or false, got '" + value + "'");
}

pt::ptree parse_ini(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DataError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

void reject_unknown(const pt::ptree& section, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.contains(key)) throw DataError("unknown key '" + key + "' in [" + name + "]");
  }
}

const std::set<std::string> kPipelineKeys = {
    "fs",       "c",        "N",    "delta_N",     "alpha",   "beta",  "sigma",   "D",
    "P0",       "loading",  "mask", "max_delay_s", "min_bin", "max_bin", "grid_deg",
    "reference_channel", "lookahead", "aec_passes"};
const std::set<std::string> kArrayKeys = {"num_mics", "radius", "positions"};
const std::set<std::string> kSceneKeys = {"azimuths",   "snr_db",    "seeds",      "base_seed",
                                          "duration_s", "lead_silence_s", "trail_silence_s", "interferer", "interferer_to_noise_db",
                                          "white_noise", "wireless_delay_samples", "spherical",
                                          "distance_m", "format"};
const std::set<std::string> kSections = {"pipeline", "array", "scene"};

PipelineConfig pipeline_from_tree(const pt::ptree& tree) {
  for (const auto& [name, section] : tree) {
    if (!kSections.contains(name)) throw DataError("unknown config section [" + name + "]");
  }

  PipelineConfig cfg;
  if (auto p = tree.get_child_optional("pipeline")) {
    reject_unknown(*p, "pipeline", kPipelineKeys);
    for (const auto& [key, node] : *p) {
      const std::string v = trim(node.data());
      if (key == "fs") cfg.sample_rate = to_double(key, v);
      else if (key == "c") cfg.geometry.speed_of_sound = to_double(key, v);
      else if (key == "N") cfg.stft.frame_size = to_int(key, v);
      else if (key == "delta_N") cfg.stft.hop_size = to_int(key, v);
      else if (key == "alpha") cfg.alpha = to_double(key, v);
      else if (key == "beta") cfg.beta = to_double(key, v);
      else if (key == "sigma") cfg.aec.process_noise = to_double(key, v);
      else if (key == "D") cfg.aec.num_taps = to_int(key, v);
      else if (key == "P0") cfg.aec.initial_state_cov = to_double(key, v);
      else if (key == "loading") cfg.loading_rel = to_double(key, v);
      else if (key == "mask") cfg.mask_kind = parse_mask_kind(v);
      else if (key == "max_delay_s") cfg.max_delay_s = to_double(key, v);
      else if (key == "min_bin") cfg.band.min_bin = to_int(key, v);
      else if (key == "max_bin") cfg.band.max_bin = to_int(key, v);
      else if (key == "grid_deg") cfg.grid_deg = to_double(key, v);
      else if (key == "reference_channel") cfg.reference_channel = to_int(key, v);
      else if (key == "lookahead") cfg.aec_lookahead = to_int(key, v);
      else if (key == "aec_passes") cfg.aec_passes = static_cast<int>(to_int(key, v));
    }
  }

  const double c = cfg.geometry.speed_of_sound;
  if (auto a = tree.get_child_optional("array")) {
    reject_unknown(*a, "array", kArrayKeys);
    if (auto positions = a->get_optional<std::string>("positions")) {
      if (a->count("num_mics") || a->count("radius"))
        throw DataError("[array] takes either positions or num_mics/radius, not both");
      const auto mics = split(*positions, ';');
      Eigen::Matrix3Xd pos(3, static_cast<Index>(mics.size()));
      for (size_t m = 0; m < mics.size(); ++m) {
        std::istringstream in(mics[m]);
        double x = 0, y = 0, z = 0;
        if (!(in >> x >> y >> z)) throw DataError("microphone position '" + mics[m] + "' needs three coordinates");
        pos.col(static_cast<Index>(m)) << x, y, z;
      }
      cfg.geometry.positions = pos;
    } else {
      const Index mics = to_int("num_mics", a->get<std::string>("num_mics", "16"));
      const double radius = to_double("radius", a->get<std::string>("radius", "0.516"));
      cfg.geometry = ArrayGeometry::circular(mics, radius, c);
    }
    cfg.geometry.speed_of_sound = c;
  }

  try {
    cfg.validate();
  } catch (const InvalidArgumentError& e) {
    throw DataError(std::string("invalid pipeline config: ") + e.what());
  }
  return cfg;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// splitmix64 finalizer; decorrelates derived seeds.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& text) { return pipeline_from_tree(parse_ini(text)); }

PipelineConfig load_pipeline_config(const std::filesystem::path& path) { return parse_pipeline_config(read_file(path)); }

std::vector<double> standard_azimuth_sweep() {
  std::vector<double> az(16);
  for (int i = 0; i < 16; ++i) az[static_cast<size_t>(i)] = 22.5 * i;
  return az;
}

std::string format_snr(const std::optional<double>& snr_db) {
  if (!snr_db) return "clean";
  std::ostringstream out;
  out.precision(6);
  out << *snr_db;
  return out.str();
}

SceneBatch parse_scene_batch(const std::string& text) {
  const pt::ptree tree = parse_ini(text);
  SceneBatch batch;
  batch.pipeline = pipeline_from_tree(tree);
  batch.azimuths_deg = standard_azimuth_sweep();
  batch.snrs_db = {5.0};

  const auto section = tree.get_child_optional("scene");
  if (!section) throw DataError("scene config has no [scene] section");
  reject_unknown(*section, "scene", kSceneKeys);
  for (const auto& [key, node] : *section) {
    const std::string v = trim(node.data());
    if (key == "azimuths") {
      batch.azimuths_deg.clear();
      if (lower(v) == "sweep") {
        batch.azimuths_deg = standard_azimuth_sweep();
      } else {
        for (const auto& item : split(v, ',')) batch.azimuths_deg.push_back(to_double(key, item));
      }
    } else if (key == "snr_db") {
      batch.snrs_db.clear();
      for (const auto& item : split(v, ',')) {
        if (lower(item) == "clean") batch.snrs_db.emplace_back(std::nullopt);
        else batch.snrs_db.emplace_back(to_double(key, item));
      }
    } else if (key == "seeds") {
      batch.seeds = static_cast<int>(to_int(key, v));
    } else if (key == "base_seed") {
      batch.base_seed = static_cast<std::uint64_t>(to_int(key, v));
    } else if (key == "duration_s") {
      batch.duration_s = to_double(key, v);
    } else if (key == "lead_silence_s") {
      batch.lead_silence_s = to_double(key, v);
    } else if (key == "trail_silence_s") {
      batch.trail_silence_s = to_double(key, v);
    } else if (key == "interferer") {
      const std::string l = lower(v);
      if (l == "none") batch.interferer = SceneBatch::Interferer::None;
      else if (l == "random") batch.interferer = SceneBatch::Interferer::Random;
      else {
        batch.interferer = SceneBatch::Interferer::FixedOffset;
        batch.interferer_offset_deg = to_double(key, v);
      }
    } else if (key == "interferer_to_noise_db") {
      batch.interferer_to_noise_db = to_double(key, v);
    } else if (key == "white_noise") {
      batch.white_noise = to_bool(key, v);
    } else if (key == "wireless_delay_samples") {
      if (const auto colon = v.find(':'); colon != std::string::npos) {
        batch.delay_min = to_int(key, trim(v.substr(0, colon)));
        batch.delay_max = to_int(key, trim(v.substr(colon + 1)));
      } else {
        batch.delay_min = batch.delay_max = to_int(key, v);
      }
      if (batch.delay_min < 0 || batch.delay_max < batch.delay_min)
        throw DataError("wireless_delay_samples must be a nonnegative value or an increasing range lo:hi");
    } else if (key == "spherical") {
      batch.spherical = to_bool(key, v);
    } else if (key == "distance_m") {
      batch.distance_m = to_double(key, v);
    } else if (key == "format") {
      const std::string l = lower(v);
      if (l == "float32") batch.format = WavFormat::Float32;
      else if (l == "pcm16") batch.format = WavFormat::Pcm16;
      else throw DataError("format must be float32 or pcm16");
    }
  }
  if (!(batch.duration_s > 0.0)) throw DataError("duration_s must be positive");
  if (!(batch.lead_silence_s >= 0.0) || !(batch.trail_silence_s >= 0.0) ||
      !(batch.lead_silence_s + batch.trail_silence_s < batch.duration_s))
    throw DataError("lead and trail silences must be nonnegative and shorter than the recording");
  return batch;
}

SceneBatch load_scene_batch(const std::filesystem::path& path) { return parse_scene_batch(read_file(path)); }

std::vector<SceneJob> SceneBatch::expand() const {
  if (azimuths_deg.empty() || snrs_db.empty() || seeds < 1)
    throw InvalidArgumentError("scene batch is empty: need at least one azimuth, one SNR and one seed");

  std::vector<SceneJob> jobs;
  jobs.reserve(azimuths_deg.size() * snrs_db.size() * static_cast<size_t>(seeds));
  for (size_t s = 0; s < snrs_db.size(); ++s) {
    for (size_t a = 0; a < azimuths_deg.size(); ++a) {
      for (int r = 0; r < seeds; ++r) {
        const std::uint64_t seed = mix(mix(mix(base_seed) + s) + a * 1000003ULL + static_cast<std::uint64_t>(r));
        SceneJob job;
        std::ostringstream id;
        id << "scene_" << std::setfill('0') << std::setw(4) << jobs.size();
        job.id = id.str();
        job.duration_s = duration_s;
        job.lead_silence_s = lead_silence_s;
        job.trail_silence_s = trail_silence_s;
        job.target_seed = mix(seed ^ 0x1);
        job.interferer_seed = mix(seed ^ 0x2);

        SceneSpec& spec = job.spec;
        spec.geometry = pipeline.geometry;
        spec.sample_rate = pipeline.sample_rate;
        spec.target_azimuth_deg = std::fmod(std::fmod(azimuths_deg[a], 360.0) + 360.0, 360.0);
        spec.snr_db = snrs_db[s];
        spec.white_noise = white_noise;
        spec.interferer_to_noise_db = interferer_to_noise_db;
        spec.spherical_wave = spherical;
        spec.target_distance_m = spec.interferer_distance_m = distance_m;
        spec.seed = seed;

        const std::uint64_t draw = mix(seed ^ 0x3);
        if (interferer != Interferer::None && snrs_db[s]) {
          // Random offsets stay at least 45 degrees away from the target.
          const double offset = interferer == Interferer::Random
                                    ? 45.0 + 270.0 * static_cast<double>(draw >> 11) * 0x1.0p-53
                                    : interferer_offset_deg;
          spec.interferer_azimuth_deg = std::fmod(std::fmod(spec.target_azimuth_deg + offset, 360.0) + 360.0, 360.0);
        }
        const std::uint64_t span = static_cast<std::uint64_t>(delay_max - delay_min) + 1;
        spec.wireless_delay_samples = delay_min + static_cast<Index>(mix(seed ^ 0x4) % span);
        jobs.push_back(std::move(job));
      }
    }
  }
  return jobs;
}

RenderedScene render_job(const SceneJob& job) {
  const double fs = job.spec.sample_rate;
  const auto total = static_cast<Index>(std::llround(job.duration_s * fs));
  const auto lead = static_cast<Index>(std::llround(job.lead_silence_s * fs));
  const double speech_s = job.duration_s - job.lead_silence_s - job.trail_silence_s;
  const TimeSignal utterance = synth_speech_like(speech_s, job.target_seed, fs);
  TimeSignal target = TimeSignal::zeros(total, fs);
  const Index len = std::min(utterance.size(), total - lead);
  target.samples.segment(lead, len) = utterance.samples.head(len);
  std::optional<TimeSignal> interferer;
  if (job.spec.interferer_azimuth_deg)
    interferer = synth_speech_like(job.duration_s, job.interferer_seed, fs);
  return render_scene(job.spec, target, interferer);
}

}  // namespace maskloc
