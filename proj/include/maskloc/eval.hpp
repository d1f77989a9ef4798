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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "maskloc/pipeline.hpp"

namespace maskloc {

/// Absolute circular difference in degrees, in [0, 180].
double angular_error(double truth_deg, double estimate_deg);

struct TrialRecord {
  std::string scene_id;
  std::string condition;
  MaskKind mask = MaskKind::None;
  double truth_deg = 0.0;
  double estimate_deg = 0.0;
  double error_deg = 0.0;
};

struct ReportRow {
  std::string condition;
  MaskKind mask = MaskKind::None;
  double avg_error_deg = 0.0;
  double accuracy_pct = 0.0;
  Index n = 0;
};

struct EvalReport {
  std::vector<ReportRow> rows;
  std::vector<TrialRecord> trials;
};

inline constexpr double kAccuracyThresholdDeg = 5.0;

/// Percentage of errors <= threshold (boundary included).
double accuracy_within(const std::vector<double>& errors_deg, double threshold_deg = kAccuracyThresholdDeg);

/// Groups trials by (condition, mask) in order of first appearance. With
/// drop_worst > 0, the worst k trials of every (condition, mask, truth
/// azimuth) group are excluded first, provided the group keeps at least one.
EvalReport aggregate(const std::vector<TrialRecord>& trials, int drop_worst = 0);

/// Runs the front end once and localizes with every requested mask kind.
std::vector<TrialRecord> evaluate_scene(const std::string& scene_id, const std::string& condition,
                                        const MultichannelSignal& array, const TimeSignal& close, double truth_deg,
                                        const PipelineConfig& config, const std::vector<MaskKind>& masks);

/// One line of the truth sidecar (truth.csv).
struct TruthRow {
  std::string scene_id;
  double truth_azimuth_deg = 0.0;
  std::string snr_db;  // number or "clean"
  Index wireless_delay_samples = 0;
};

inline constexpr const char* kTruthFile = "truth.csv";

void write_truth_csv(const std::filesystem::path& path, const std::vector<TruthRow>& rows);
std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path);

std::filesystem::path array_wav_path(const std::filesystem::path& dir, const std::string& scene_id);
std::filesystem::path close_wav_path(const std::filesystem::path& dir, const std::string& scene_id);

struct EvaluateOptions {
  std::vector<MaskKind> masks = {MaskKind::None, MaskKind::Irm, MaskKind::IrmStar};
  int drop_worst = 0;
  unsigned jobs = 1;
};

/// Evaluates every scene listed in `scene_dir/truth.csv`; the condition label
/// is the scene's SNR. Scenes run on a worker pool; results are collected in
/// truth-file order so reports do not depend on scheduling.
EvalReport evaluate_directory(const std::filesystem::path& scene_dir, const PipelineConfig& config,
                              const EvaluateOptions& options);

/// "condition,mask,avg_error_deg,acc5_pct,n"
void write_report_csv(std::ostream& out, const EvalReport& report);
/// "scene_id,condition,mask,truth_deg,estimate_deg,error_deg"
void write_trials_csv(std::ostream& out, const EvalReport& report);
std::string format_report_table(const EvalReport& report);

}  // namespace maskloc
