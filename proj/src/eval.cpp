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

#include "maskloc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "maskloc/wav.hpp"

namespace maskloc {

double angular_error(double truth_deg, double estimate_deg) {
  double d = std::fmod(std::abs(truth_deg - estimate_deg), 360.0);
  return std::min(d, 360.0 - d);
}

double accuracy_within(const std::vector<double>& errors_deg, double threshold_deg) {
  if (errors_deg.empty()) return 0.0;
  const auto hits = std::count_if(errors_deg.begin(), errors_deg.end(), [&](double e) { return e <= threshold_deg; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(errors_deg.size());
}

EvalReport aggregate(const std::vector<TrialRecord>& trials, int drop_worst) {
  EvalReport report;
  report.trials = trials;

  std::vector<std::pair<std::string, MaskKind>> order;
  std::map<std::pair<std::string, MaskKind>, std::map<double, std::vector<double>>> groups;
  for (const auto& t : trials) {
    const auto key = std::make_pair(t.condition, t.mask);
    if (!groups.contains(key)) order.push_back(key);
    groups[key][t.truth_deg].push_back(t.error_deg);
  }

  for (const auto& key : order) {
    std::vector<double> kept;
    for (auto& [truth, errors] : groups[key]) {
      std::vector<double> sorted = errors;
      std::stable_sort(sorted.begin(), sorted.end());
      const auto drop = static_cast<size_t>(std::max(0, drop_worst));
      const size_t keep = sorted.size() > drop ? sorted.size() - drop : sorted.size();
      kept.insert(kept.end(), sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    ReportRow row;
    row.condition = key.first;
    row.mask = key.second;
    row.n = static_cast<Index>(kept.size());
    double sum = 0.0;
    for (double e : kept) sum += e;
    row.avg_error_deg = kept.empty() ? 0.0 : sum / static_cast<double>(kept.size());
    row.accuracy_pct = accuracy_within(kept);
    report.rows.push_back(row);
  }
  return report;
}

std::vector<TrialRecord> evaluate_scene(const std::string& scene_id, const std::string& condition,
                                        const MultichannelSignal& array, const TimeSignal& close, double truth_deg,
                                        const PipelineConfig& config, const std::vector<MaskKind>& masks) {
  const FrontEnd front = run_front_end(array, close, config);
  std::vector<TrialRecord> out;
  for (MaskKind kind : masks) {
    const DoaResult doa = localize_with_mask(front, mask_for(front, kind, config), config);
    out.push_back({scene_id, condition, kind, truth_deg, doa.best_azimuth_deg,
                   angular_error(truth_deg, doa.best_azimuth_deg)});
  }
  return out;
}

void write_truth_csv(const std::filesystem::path& path, const std::vector<TruthRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write truth file '" + path.string() + "'");
  out << "scene_id,truth_azimuth_deg,snr_db,wireless_delay_samples\n";
  out.precision(10);
  for (const auto& r : rows)
    out << r.scene_id << ',' << r.truth_azimuth_deg << ',' << r.snr_db << ',' << r.wireless_delay_samples << '\n';
}

std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing truth file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("scene_id", 0) != 0)
    throw DataError("truth file '" + path.string() + "' lacks the expected header");
  std::vector<TruthRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, truth, snr, delay;
    if (!std::getline(ss, id, ',') || !std::getline(ss, truth, ',') || !std::getline(ss, snr, ',') ||
        !std::getline(ss, delay, ','))
      throw DataError("truth file line " + std::to_string(lineno) + " needs four fields");
    try {
      rows.push_back({id, std::stod(truth), snr, static_cast<Index>(std::stoll(delay))});
    } catch (const std::exception&) {
      throw DataError("truth file line " + std::to_string(lineno) + " has a malformed number");
    }
  }
  return rows;
}

std::filesystem::path array_wav_path(const std::filesystem::path& dir, const std::string& scene_id) {
  return dir / (scene_id + "_array.wav");
}

std::filesystem::path close_wav_path(const std::filesystem::path& dir, const std::string& scene_id) {
  return dir / (scene_id + "_close.wav");
}

EvalReport evaluate_directory(const std::filesystem::path& scene_dir, const PipelineConfig& config,
                              const EvaluateOptions& options) {
  const auto truth = read_truth_csv(scene_dir / kTruthFile);
  if (options.masks.empty()) throw InvalidArgumentError("no mask kinds requested");

  std::vector<std::vector<TrialRecord>> results(truth.size());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (size_t i = next++; i < truth.size(); i = next++) {
      try {
        const auto& row = truth[i];
        const MultichannelSignal array = read_wav(array_wav_path(scene_dir, row.scene_id));
        const MultichannelSignal close = read_wav(close_wav_path(scene_dir, row.scene_id));
        if (close.num_channels() != 1)
          throw DataError("close-talk file for " + row.scene_id + " must be mono");
        results[i] = evaluate_scene(row.scene_id, row.snr_db, array, close.channel(0), row.truth_azimuth_deg, config,
                                    options.masks);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(truth.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TrialRecord> trials;
  for (auto& r : results) trials.insert(trials.end(), r.begin(), r.end());
  return aggregate(trials, options.drop_worst);
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "condition,mask,avg_error_deg,acc5_pct,n\n";
  out << std::fixed;
  for (const auto& r : report.rows)
    out << r.condition << ',' << to_string(r.mask) << ',' << std::setprecision(4) << r.avg_error_deg << ','
        << std::setprecision(2) << r.accuracy_pct << ',' << r.n << '\n';
}

void write_trials_csv(std::ostream& out, const EvalReport& report) {
  out << "scene_id,condition,mask,truth_deg,estimate_deg,error_deg\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& t : report.trials)
    out << t.scene_id << ',' << t.condition << ',' << to_string(t.mask) << ',' << t.truth_deg << ',' << t.estimate_deg
        << ',' << t.error_deg << '\n';
}

std::string format_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "SNR (dB)" << std::setw(10) << "Mask" << std::right << std::setw(16)
      << "Avg. Error (deg)" << std::setw(14) << "Accuracy (%)" << std::setw(6) << "n" << '\n';
  out << std::fixed;
  for (const auto& r : report.rows)
    out << std::left << std::setw(12) << r.condition << std::setw(10) << to_string(r.mask) << std::right
        << std::setw(16) << std::setprecision(2) << r.avg_error_deg << std::setw(14) << r.accuracy_pct
        << std::setw(6) << r.n << '\n';
  return out.str();
}

}  // namespace maskloc
