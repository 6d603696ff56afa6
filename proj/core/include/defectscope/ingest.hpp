#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "defectscope/geometry.hpp"
#include "defectscope/image.hpp"

namespace dscope {

struct DatasetPaths {
  std::filesystem::path images_dir;
  std::filesystem::path gt_dir;
  std::filesystem::path pred_dir;
};

enum class TaskMode { detection, classification, joint };

const char* task_mode_name(TaskMode mode);
std::optional<TaskMode> parse_task_mode(const std::string& name);

// One ground-truth (or predicted) connected region.
struct DefectInstance {
  std::string defect_id;    // "<stem>#<index>"
  std::string image_stem;
  int class_id = 0;
  std::vector<Point> pixels;   // sorted by (y, x)
  BBox bbox;
  std::vector<Point> contour;  // closed polygon stored open, CCW
};

struct MatchResult {
  std::string gt_id;
  std::optional<std::string> matched_pred_id;
  double iou = 0.0;
  std::optional<int> predicted_class;
};

// Binary outcome vectors over all ground-truth defects, in defect order.
// Classification vectors are empty in detection mode.
struct ReasoningTargets {
  TaskMode mode = TaskMode::detection;
  std::vector<std::uint8_t> detected;
  std::vector<std::uint8_t> undetected;
  std::vector<std::uint8_t> correctly_classified;
  std::vector<std::uint8_t> misclassified;
};

struct DatasetEntry {
  std::string stem;
  std::filesystem::path image_path;
  MaskImage gt;
  std::optional<MaskImage> pred;  // absent file means the model predicted nothing
};

// Lists the dataset folders, decodes masks, and validates the layout.
// Entries come back sorted lexicographically by stem; all-zero GT masks are
// skipped with a warning on stderr.
std::vector<DatasetEntry> scan_dataset(const DatasetPaths& paths);

// 8-connected same-class regions with Moore-traced outer contours, ordered by
// (y_min, x_min). defect_id/image_stem are left to the caller (assign_defect_ids).
std::vector<DefectInstance> extract_components(const MaskImage& mask);

void assign_defect_ids(std::vector<DefectInstance>& instances, const std::string& stem);

double pixel_iou(const DefectInstance& a, const DefectInstance& b);

// Greedy one-to-one pixel-IoU matching; class agreement is not required.
std::vector<MatchResult> match_predictions(const std::vector<DefectInstance>& gt,
                                           const std::vector<DefectInstance>& pred,
                                           double iou_threshold);

ReasoningTargets build_reasoning_targets(const std::vector<MatchResult>& matches,
                                         const std::vector<DefectInstance>& gt,
                                         TaskMode mode);

struct IngestResult {
  std::vector<DefectInstance> defects;            // all GT defects, stem order
  std::map<std::string, std::filesystem::path> image_paths;
  ReasoningTargets targets;
};

// Full first stage: scan, extract, match, and label every GT defect.
IngestResult ingest_dataset(const DatasetPaths& paths, TaskMode mode, double iou_threshold,
                            int threads = 0);

void write_targets_csv(const std::filesystem::path& path,
                       const std::vector<DefectInstance>& defects,
                       const ReasoningTargets& targets);

struct TargetsCsv {
  std::vector<std::string> defect_ids;
  std::vector<std::string> image_stems;
  std::vector<int> class_ids;
  ReasoningTargets targets;
};

TargetsCsv read_targets_csv(const std::filesystem::path& path);

}  // namespace dscope
