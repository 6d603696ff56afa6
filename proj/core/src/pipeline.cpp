#include "defectscope/pipeline.hpp"

#include <chrono>
#include <fstream>

#include <nlohmann/json.hpp>

#include "defectscope/features.hpp"
#include "defectscope/parallel.hpp"

namespace dscope {

using json = nlohmann::ordered_json;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::unreadable_file:
    case Errc::io_failure:
      return kExitIo;
    case Errc::degenerate_target:
      return kExitAllDegenerate;
    default:
      return kExitConfig;
  }
}

void RunConfig::validate(bool check_dataset_dirs) const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    raise(Errc::invalid_config, "iou_threshold must be in (0, 1]");
  }
  forest.validate();
  if (top_k < 1) raise(Errc::invalid_config, "top_k must be >= 1");
  if (out_dir.empty()) raise(Errc::invalid_config, "output directory is required");
  if (check_dataset_dirs) {
    for (const auto& [dir, label] :
         {std::pair{paths.images_dir, "images"}, {paths.gt_dir, "ground-truth"},
          {paths.pred_dir, "prediction"}}) {
      std::error_code ec;
      if (dir.empty() || !std::filesystem::is_directory(dir, ec)) {
        raise(Errc::invalid_config,
              std::string(label) + " directory missing or not a directory: " + dir.string());
      }
    }
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const std::vector<std::string>& canonical_targets() {
  static const std::vector<std::string> names = {"detected", "undetected", "correctly_classified",
                                                 "misclassified"};
  return names;
}

json route_json(const Route& route) {
  json j;
  j["tree"] = route.tree_id;
  j["leaf"] = route.leaf_node_id;
  j["class"] = route.leaf_class;
  j["support"] = route.support;
  j["purity"] = route.purity;
  json conds = json::array();
  for (const RouteCondition& c : route.conditions) {
    json jc;
    jc["dc"] = c.dc_name;
    jc["op"] = c.greater ? ">" : "<=";
    jc["threshold"] = c.threshold;
    conds.push_back(jc);
  }
  j["conditions"] = conds;
  return j;
}

void write_summary_json(const std::filesystem::path& path, const std::string& target,
                        const DCSummary& summary) {
  json j;
  j["target"] = target;
  json dcs = json::array();
  for (const DCReport& r : summary.per_dc) {
    json jr;
    jr["name"] = r.name;
    jr["importance"] = r.importance;
    json fr = json::array();
    for (const auto& [lo, hi] : r.failure_ranges) fr.push_back({lo, hi});
    jr["failure_ranges"] = fr;
    json sr = json::array();
    for (const auto& [lo, hi] : r.success_ranges) sr.push_back({lo, hi});
    jr["success_ranges"] = sr;
    dcs.push_back(jr);
  }
  j["dc"] = dcs;
  json r1 = json::array();
  for (const Route& r : summary.route_to_1) r1.push_back(route_json(r));
  j["routes_to_1"] = r1;
  json r0 = json::array();
  for (const Route& r : summary.route_to_0) r0.push_back(route_json(r));
  j["routes_to_0"] = r0;
  write_atomic(path, j.dump(2) + "\n");
}

json config_json(const RunConfig& config, const char* command) {
  json j;
  j["command"] = command;
  j["images"] = config.paths.images_dir.string();
  j["gt"] = config.paths.gt_dir.string();
  j["pred"] = config.paths.pred_dir.string();
  j["task"] = task_mode_name(config.task);
  j["iou_threshold"] = config.iou_threshold;
  j["trees"] = config.forest.n_tree;
  j["max_depth"] = config.forest.max_depth;
  j["min_samples_leaf"] = config.forest.min_samples_leaf;
  j["features_per_split"] = config.forest.features_per_split;
  j["seed"] = config.forest.seed;
  j["balance_classes"] = config.forest.balance_classes;
  j["good_learned_threshold"] = config.forest.good_learned_threshold;
  j["route_plot"] = config.route_plot;
  j["top_k"] = config.top_k;
  j["threads"] = config.threads;
  j["out"] = config.out_dir.string();
  return j;
}

struct StageOutputs {
  json targets = json::object();
  json outputs = json::array();
  int completed = 0;
};

// The six reasoning steps for one target, with per-step timing.
void reason_target(const std::string& name, const std::vector<std::uint8_t>& target,
                   const DCMatrix& matrix, const FeatureRange& ranges, const RunConfig& config,
                   TimingRecord& timing, StageOutputs& stage) {
  TargetTiming tt;
  json entry;

  auto start = Clock::now();
  Forest forest;
  try {
    forest = plant_forest(matrix, target, config.forest, config.threads);
  } catch (const Error& e) {
    if (e.code() == Errc::degenerate_target) {
      entry["status"] = "skipped";
      entry["reason"] = e.what();
      stage.targets[name] = entry;
      return;
    }
    throw;
  }
  const std::filesystem::path target_dir = config.out_dir / name;
  if (config.dumps.forest_json) {
    std::filesystem::create_directories(target_dir);
    write_forest_json(target_dir / "forest.json", forest, matrix.feature_list);
  }
  tt.plant = ms_since(start);

  start = Clock::now();
  const ValidationReport validation = val_forest(forest, matrix, target, config.threads);
  tt.validate = ms_since(start);

  start = Clock::now();
  const ClimbResult climbed = climb_forest(forest, matrix.feature_list);
  tt.climb = ms_since(start);

  start = Clock::now();
  const std::vector<NodeAnalysis> analysed = analyse_forest(climbed, validation.error_features);
  tt.analyse = ms_since(start);

  start = Clock::now();
  DCSummary summary;
  try {
    summary = summary_forest(analysed, climbed.routes, matrix.feature_list, ranges, config.top_k);
  } catch (const Error& e) {
    if (e.code() == Errc::no_routes) {
      entry["status"] = "skipped";
      entry["reason"] = e.what();
      stage.targets[name] = entry;
      return;
    }
    throw;
  }
  if (config.dumps.summary_json) {
    std::filesystem::create_directories(target_dir);
    write_summary_json(target_dir / "summary.json", name, summary);
  }
  tt.summarise = ms_since(start);

  start = Clock::now();
  const ReportBundle bundle =
      explain_forest(summary, matrix.feature_list, name, target_dir, config.route_plot);
  tt.explain = ms_since(start);

  entry["status"] = "completed";
  entry["good_learned"] = validation.good_learned;
  entry["learning_score"] = validation.learning_score;
  entry["tpr"] = validation.tpr;
  entry["tnr"] = validation.tnr;
  json errf = json::array();
  for (const std::string& f : validation.error_features) errf.push_back(f);
  entry["error_features"] = errf;
  stage.targets[name] = entry;
  ++stage.completed;

  for (const ManifestEntry& m : bundle.entries) {
    json o;
    o["path"] = name + "/" + m.name;
    o["bytes"] = m.bytes;
    o["kind"] = m.kind;
    stage.outputs.push_back(o);
  }
  timing.per_target.emplace_back(name, tt);
}

void add_root_output(StageOutputs& stage, const std::filesystem::path& out_dir,
                     const std::string& name, const std::string& kind) {
  json o;
  o["path"] = name;
  o["bytes"] = std::filesystem::file_size(out_dir / name);
  o["kind"] = kind;
  stage.outputs.push_back(o);
}

void write_timing_json(const std::filesystem::path& path, const TimingRecord& timing) {
  json j;
  j["ingest"] = timing.ingest;
  j["feature_extraction"] = timing.feature_extraction;
  json per_target = json::object();
  for (const auto& [name, tt] : timing.per_target) {
    json steps;
    steps["plant"] = tt.plant;
    steps["validate"] = tt.validate;
    steps["climb"] = tt.climb;
    steps["analyse"] = tt.analyse;
    steps["summarise"] = tt.summarise;
    steps["explain"] = tt.explain;
    per_target[name] = steps;
  }
  j["per_target"] = per_target;
  j["total"] = timing.total;
  write_atomic(path, j.dump(2) + "\n");
}

int finish_reasoning(const RunConfig& config, const char* command, const TargetVectors& targets,
                     const DCMatrix& matrix, const FeatureRange& ranges, TimingRecord& timing,
                     StageOutputs& stage, Clock::time_point total_start,
                     TimingRecord* timing_out) {
  for (const auto& [name, vector] : targets) {
    reason_target(name, vector, matrix, ranges, config, timing, stage);
  }
  // Targets that do not exist for this task mode are reported as N/A.
  for (const std::string& name : canonical_targets()) {
    if (!stage.targets.contains(name)) {
      json entry;
      entry["status"] = "N/A";
      stage.targets[name] = entry;
    }
  }
  timing.total = ms_since(total_start);

  write_timing_json(config.out_dir / "timing.json", timing);

  json manifest;
  manifest["config"] = config_json(config, command);
  manifest["defect_count"] = matrix.rows.size();
  json ordered_targets = json::object();
  for (const std::string& name : canonical_targets()) {
    ordered_targets[name] = stage.targets[name];
  }
  manifest["targets"] = ordered_targets;
  manifest["outputs"] = stage.outputs;
  write_atomic(config.out_dir / "manifest.json", manifest.dump(2) + "\n");

  if (timing_out) *timing_out = timing;
  return stage.completed > 0 ? kExitOk : kExitAllDegenerate;
}

}  // namespace

int run_pipeline(const RunConfig& config, TimingRecord* timing_out) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) raise(Errc::io_failure, "cannot create " + config.out_dir.string());

  TimingRecord timing;
  StageOutputs stage;
  const auto total_start = Clock::now();

  auto start = Clock::now();
  const IngestResult ingest =
      ingest_dataset(config.paths, config.task, config.iou_threshold, config.threads);
  if (config.dumps.targets_csv) {
    write_targets_csv(config.out_dir / "targets.csv", ingest.defects, ingest.targets);
  }
  timing.ingest = ms_since(start);

  start = Clock::now();
  const std::vector<DCVector> vectors = extract_all_features(ingest, config.threads);
  const AssembledData assembled = assemble_matrix(ingest.defects, vectors, ingest.targets);
  const FeatureRange ranges = compute_feature_range(assembled.matrix);
  if (config.dumps.matrix_csv) {
    write_dc_matrix_csv(config.out_dir / "dc_matrix.csv", assembled.matrix);
  }
  timing.feature_extraction = ms_since(start);

  if (config.dumps.targets_csv) add_root_output(stage, config.out_dir, "targets.csv", "targets_csv");
  if (config.dumps.matrix_csv) add_root_output(stage, config.out_dir, "dc_matrix.csv", "matrix_csv");

  return finish_reasoning(config, "run", assembled.targets, assembled.matrix, ranges, timing,
                          stage, total_start, timing_out);
}

int run_extract(const RunConfig& config) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) raise(Errc::io_failure, "cannot create " + config.out_dir.string());

  const IngestResult ingest =
      ingest_dataset(config.paths, config.task, config.iou_threshold, config.threads);
  write_targets_csv(config.out_dir / "targets.csv", ingest.defects, ingest.targets);

  const std::vector<DCVector> vectors = extract_all_features(ingest, config.threads);
  const AssembledData assembled = assemble_matrix(ingest.defects, vectors, ingest.targets);
  write_dc_matrix_csv(config.out_dir / "dc_matrix.csv", assembled.matrix);
  return kExitOk;
}

int run_reason(const ReasonInputs& inputs, const RunConfig& config, TimingRecord* timing_out) {
  config.validate(/*check_dataset_dirs=*/false);
  const DCMatrix matrix = read_dc_matrix_csv(inputs.matrix_csv);
  const TargetsCsv targets_csv = read_targets_csv(inputs.targets_csv);
  if (targets_csv.defect_ids != matrix.id_list) {
    raise(Errc::invalid_dataset, "targets csv and matrix csv list different defects");
  }

  TargetVectors targets;
  targets.emplace_back("detected", targets_csv.targets.detected);
  targets.emplace_back("undetected", targets_csv.targets.undetected);
  if (targets_csv.targets.mode != TaskMode::detection) {
    targets.emplace_back("correctly_classified", targets_csv.targets.correctly_classified);
    targets.emplace_back("misclassified", targets_csv.targets.misclassified);
  }
  const FeatureRange ranges = compute_feature_range(matrix);

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) raise(Errc::io_failure, "cannot create " + config.out_dir.string());

  TimingRecord timing;
  StageOutputs stage;
  const auto total_start = Clock::now();
  return finish_reasoning(config, "reason", targets, matrix, ranges, timing, stage, total_start,
                          timing_out);
}

}  // namespace dscope
