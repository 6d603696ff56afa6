#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "defectscope/analysis.hpp"
#include "defectscope/errors.hpp"
#include "defectscope/forest.hpp"
#include "defectscope/ingest.hpp"
#include "defectscope/report.hpp"

namespace dscope {

struct DumpFlags {
  bool targets_csv = true;
  bool matrix_csv = true;
  bool forest_json = false;
  bool summary_json = false;
};

struct RunConfig {
  DatasetPaths paths;
  TaskMode task = TaskMode::joint;
  double iou_threshold = 0.5;
  ForestConfig forest;
  std::filesystem::path out_dir;
  bool route_plot = false;
  DumpFlags dumps;
  int threads = 0;  // <= 0: hardware concurrency
  int top_k = 5;

  // Throws Error(invalid_config / invalid_dataset) before any output exists.
  void validate(bool check_dataset_dirs = true) const;
};

struct TargetTiming {
  double plant = 0.0;
  double validate = 0.0;
  double climb = 0.0;
  double analyse = 0.0;
  double summarise = 0.0;
  double explain = 0.0;
};

// Wall-clock milliseconds per stage; reasoning steps are per target.
struct TimingRecord {
  double ingest = 0.0;
  double feature_extraction = 0.0;
  std::vector<std::pair<std::string, TargetTiming>> per_target;
  double total = 0.0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitAllDegenerate = 4;

int exit_code_for(Errc code);

// End-to-end run: ingest, feature extraction, then the six reasoning steps
// per available target. Writes timing.json and manifest.json at out_dir root.
// Returns 0 when at least one target completed, 4 when every target was
// degenerate; config/dataset/IO problems throw Error.
int run_pipeline(const RunConfig& config, TimingRecord* timing_out = nullptr);

// First two stages only; dumps targets.csv and dc_matrix.csv into out_dir.
int run_extract(const RunConfig& config);

struct ReasonInputs {
  std::filesystem::path matrix_csv;
  std::filesystem::path targets_csv;
};

// Reasoning stage driven by CSV dumps instead of image folders. Reports are
// byte-identical to a full run with the same forest settings.
int run_reason(const ReasonInputs& inputs, const RunConfig& config,
               TimingRecord* timing_out = nullptr);

}  // namespace dscope
