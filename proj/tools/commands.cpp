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

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "maskloc/config.hpp"
#include "maskloc/dump.hpp"
#include "maskloc/eval.hpp"
#include "maskloc/pipeline.hpp"
#include "maskloc/wav.hpp"

namespace maskloc::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::string mask;
  double grid_deg = 0.0;
};

PipelineConfig pipeline_from(const CommonOptions& opts) {
  PipelineConfig cfg = opts.config.empty() ? PipelineConfig{} : load_pipeline_config(opts.config);
  if (!opts.mask.empty()) cfg.mask_kind = parse_mask_kind(opts.mask);
  if (opts.grid_deg > 0.0) cfg.grid_deg = opts.grid_deg;
  return cfg;
}

struct Recording {
  MultichannelSignal array;
  TimeSignal close;
};

Recording load_recording(const std::string& array_wav, const std::string& close_wav, const PipelineConfig& cfg) {
  Recording rec{read_wav(array_wav), {}};
  const MultichannelSignal close = read_wav(close_wav);
  if (close.num_channels() != 1)
    throw DataError("close-talk recording '" + close_wav + "' must be mono, found " +
                    std::to_string(close.num_channels()) + " channels");
  if (rec.array.num_channels() != cfg.geometry.size())
    throw DataError("array recording '" + array_wav + "' has " + std::to_string(rec.array.num_channels()) +
                    " channels; the configured geometry expects M = " + std::to_string(cfg.geometry.size()));
  if (rec.array.sample_rate != cfg.sample_rate || close.sample_rate != cfg.sample_rate)
    throw DataError("recordings must be sampled at the configured " + std::to_string(cfg.sample_rate) + " Hz");
  rec.close = close.channel(0);
  return rec;
}

// Field-recording figures for the same three-row layout, printed only for
// side-by-side reading of the simulated table.
void print_field_reference(std::ostream& out) {
  out << "\nreference (field recordings): avg error deg / accuracy %\n"
      << "  SNR 1:  none 81.38 / 17.95   irm 10.72 / 89.74   irm-star 4.00 / 94.87\n"
      << "  SNR 5:  none 52.54 / 46.15   irm 3.15 / 97.43    irm-star 2.87 / 97.43\n"
      << "  SNR 10: none 32.36 / 66.67   irm 14.54 / 89.74   irm-star 7.08 / 94.88\n";
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<long long> seed,
                 std::ostream& out) {
  SceneBatch batch = load_scene_batch(config_path);
  if (seed) batch.base_seed = static_cast<std::uint64_t>(*seed);
  const auto jobs = batch.expand();
  fs::create_directories(out_dir);
  std::vector<TruthRow> truth;
  for (const auto& job : jobs) {
    const RenderedScene scene = render_job(job);
    write_wav(array_wav_path(out_dir, job.id), scene.array, batch.format);
    write_wav(close_wav_path(out_dir, job.id), scene.close, batch.format);
    truth.push_back({job.id, scene.truth_azimuth_deg, format_snr(job.spec.snr_db), job.spec.wireless_delay_samples});
  }
  write_truth_csv(fs::path(out_dir) / kTruthFile, truth);
  out << "wrote " << jobs.size() << " scenes to " << out_dir << '\n';
  return kExitOk;
}

int cmd_localize(const CommonOptions& common, const std::string& array_wav, const std::string& close_wav,
                 const std::string& dump_mask, const std::string& dump_powermap, const std::string& mask_csv,
                 std::ostream& out) {
  const PipelineConfig cfg = pipeline_from(common);
  const Recording rec = load_recording(array_wav, close_wav, cfg);
  const LocalizeResult result = localize(rec.array, rec.close, cfg);
  out << std::fixed << std::setprecision(2);
  out << "azimuth_deg " << result.doa.best_azimuth_deg << '\n';
  out << "elevation_deg " << result.doa.best_elevation_deg << '\n';
  out << "frame_delay " << result.frame_delay << '\n';
  out << "erle_db " << result.erle_db << '\n';
  out << "mask " << to_string(cfg.mask_kind) << '\n';
  if (!dump_mask.empty()) write_matrix_dump(dump_mask, result.mask.values);
  if (!mask_csv.empty()) write_mask_csv(mask_csv, result.mask);
  if (!dump_powermap.empty()) write_power_map_csv(dump_powermap, DoaGrid::azimuth_ring(cfg.grid_deg), result.doa);
  return kExitOk;
}

int cmd_mask_dump(const CommonOptions& common, const std::string& array_wav, const std::string& close_wav,
                  const std::string& out_path, const std::string& csv_path, std::ostream& out) {
  const PipelineConfig cfg = pipeline_from(common);
  const Recording rec = load_recording(array_wav, close_wav, cfg);
  const FrontEnd front = run_front_end(rec.array, rec.close, cfg);
  const RatioMask mask = mask_for(front, cfg.mask_kind, cfg);
  write_matrix_dump(out_path, mask.values);
  if (!csv_path.empty()) write_mask_csv(csv_path, mask);
  out << "wrote " << to_string(mask.kind) << " mask " << mask.frames() << "x" << mask.freqs() << " to " << out_path
      << '\n';
  return kExitOk;
}

int cmd_evaluate(const CommonOptions& common, const std::string& scene_dir, const std::vector<std::string>& masks,
                 int drop_worst, unsigned jobs, const std::string& report_path, const std::string& trials_path,
                 std::ostream& out) {
  const PipelineConfig cfg = pipeline_from(common);
  EvaluateOptions opts;
  opts.drop_worst = drop_worst;
  opts.jobs = jobs;
  if (!masks.empty()) {
    opts.masks.clear();
    for (const auto& m : masks) opts.masks.push_back(parse_mask_kind(m));
  }
  const EvalReport report = evaluate_directory(scene_dir, cfg, opts);

  if (!report_path.empty()) {
    std::ofstream f(report_path);
    if (!f) throw DataError("cannot write report '" + report_path + "'");
    write_report_csv(f, report);
  } else {
    write_report_csv(out, report);
  }
  if (!trials_path.empty()) {
    std::ofstream f(trials_path);
    if (!f) throw DataError("cannot write trials file '" + trials_path + "'");
    write_trials_csv(f, report);
  }
  out << '\n' << format_report_table(report);
  print_field_reference(out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"maskloc: selective sound source localization with a close-talk reference"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Pipeline config file (INI)");
    sub->add_option("--mask", common.mask, "Mask kind: none, irm, irm-star");
    sub->add_option("--grid-deg", common.grid_deg, "Azimuth grid resolution in degrees")->check(CLI::PositiveNumber);
  };

  std::string scene_config, out_dir;
  std::optional<long long> seed;
  auto* simulate = app.add_subcommand("simulate", "Render simulated scenes to WAV plus a truth sidecar");
  simulate->add_option("--config", scene_config, "Scene batch config file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the batch's base seed");

  std::string array_wav, close_wav, dump_mask, dump_powermap, mask_csv;
  auto* loc = app.add_subcommand("localize", "Estimate the talker's direction of arrival");
  loc->add_option("array_wav", array_wav, "Multichannel array recording")->required();
  loc->add_option("close_wav", close_wav, "Close-talk recording")->required();
  add_common(loc);
  loc->add_option("--dump-mask", dump_mask, "Write the mask as a binary matrix dump");
  loc->add_option("--mask-csv", mask_csv, "Write the mask as CSV");
  loc->add_option("--dump-powermap", dump_powermap, "Write the power map as CSV");

  std::string scene_dir, report_path, trials_path;
  std::vector<std::string> eval_masks;
  int drop_worst = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* eval = app.add_subcommand("evaluate", "Localize every scene in a directory and report error statistics");
  eval->add_option("scene_dir", scene_dir, "Directory written by simulate")->required();
  eval->add_option("--config", common.config, "Pipeline config file (INI)");
  eval->add_option("--grid-deg", common.grid_deg, "Azimuth grid resolution in degrees")->check(CLI::PositiveNumber);
  eval->add_option("--mask", eval_masks, "Mask kinds to compare (default: all)")->delimiter(',');
  eval->add_option("--drop-worst", drop_worst, "Exclude the k worst trials per azimuth")->check(CLI::NonNegativeNumber);
  eval->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  eval->add_option("--out", report_path, "Report CSV path (default: stdout)");
  eval->add_option("--trials", trials_path, "Per-trial CSV path");

  std::string mask_out, mask_csv_out;
  auto* dump = app.add_subcommand("mask-dump", "Compute the time-frequency mask and write it to disk");
  dump->add_option("array_wav", array_wav, "Multichannel array recording")->required();
  dump->add_option("close_wav", close_wav, "Close-talk recording")->required();
  add_common(dump);
  dump->add_option("--out", mask_out, "Binary matrix dump path")->required();
  dump->add_option("--csv", mask_csv_out, "Optional CSV export");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(scene_config, out_dir, seed, out);
    if (*loc) return cmd_localize(common, array_wav, close_wav, dump_mask, dump_powermap, mask_csv, out);
    if (*eval) return cmd_evaluate(common, scene_dir, eval_masks, drop_worst, jobs, report_path, trials_path, out);
    if (*dump) return cmd_mask_dump(common, array_wav, close_wav, mask_out, mask_csv_out, out);
  } catch (const InvalidArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace maskloc::cli
