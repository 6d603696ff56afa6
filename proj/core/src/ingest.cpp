#include "defectscope/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "defectscope/errors.hpp"
#include "defectscope/parallel.hpp"

namespace dscope {

const char* task_mode_name(TaskMode mode) {
  switch (mode) {
    case TaskMode::detection: return "detection";
    case TaskMode::classification: return "classification";
    case TaskMode::joint: return "joint";
  }
  return "unknown";
}

std::optional<TaskMode> parse_task_mode(const std::string& name) {
  if (name == "detection") return TaskMode::detection;
  if (name == "classification") return TaskMode::classification;
  if (name == "joint") return TaskMode::joint;
  return std::nullopt;
}

namespace {

bool is_png(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

std::map<std::string, std::filesystem::path> list_pngs(const std::filesystem::path& dir,
                                                       const char* label) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    raise(Errc::invalid_dataset, std::string(label) + " directory not found: " + dir.string());
  }
  std::map<std::string, std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_png(entry.path())) {
      out.emplace(entry.path().stem().string(), entry.path());
    }
  }
  return out;
}

}  // namespace

std::vector<DatasetEntry> scan_dataset(const DatasetPaths& paths) {
  const auto images = list_pngs(paths.images_dir, "images");
  const auto gts = list_pngs(paths.gt_dir, "ground-truth");
  const auto preds = list_pngs(paths.pred_dir, "prediction");

  for (const auto& [stem, path] : preds) {
    if (!gts.count(stem)) {
      raise(Errc::invalid_dataset,
            "predicted mask " + path.string() + " has no ground-truth counterpart");
    }
  }

  std::vector<DatasetEntry> entries;
  entries.reserve(gts.size());
  for (const auto& [stem, gt_path] : gts) {  // std::map iterates stems in sorted order
    auto img_it = images.find(stem);
    if (img_it == images.end()) {
      raise(Errc::missing_image, "no original image for ground-truth stem '" + stem + "'");
    }
    const PngDims dims = read_png_dims(img_it->second);

    DatasetEntry entry;
    entry.stem = stem;
    entry.image_path = img_it->second;
    entry.gt = read_mask_png(gt_path);
    if (entry.gt.width != dims.width || entry.gt.height != dims.height) {
      raise(Errc::dimension_mismatch,
            "ground-truth mask " + gt_path.string() + " is " + std::to_string(entry.gt.width) +
                "x" + std::to_string(entry.gt.height) + " but image is " +
                std::to_string(dims.width) + "x" + std::to_string(dims.height));
    }
    const bool all_zero =
        std::all_of(entry.gt.classes.begin(), entry.gt.classes.end(),
                    [](std::uint8_t c) { return c == 0; });
    if (all_zero) {
      std::cerr << "warning: ground-truth mask for '" << stem << "' has no defect pixels, skipping\n";
      continue;
    }
    if (auto pred_it = preds.find(stem); pred_it != preds.end()) {
      MaskImage pred = read_mask_png(pred_it->second);
      if (pred.width != dims.width || pred.height != dims.height) {
        raise(Errc::dimension_mismatch,
              "predicted mask " + pred_it->second.string() + " does not match image size");
      }
      entry.pred = std::move(pred);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

namespace {

// Moore boundary tracing over one component, 8-connected, with Jacob's
// stopping criterion. inside() answers membership for arbitrary coordinates.
template <typename Inside>
std::vector<Point> moore_trace(Point start, const Inside& inside, std::size_t pixel_count) {
  // Clockwise neighbour ring, starting west.
  static constexpr int DX[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  static constexpr int DY[8] = {0, -1, -1, -1, 0, 1, 1, 1};

  std::vector<Point> contour;
  contour.push_back(start);

  int backtrack = 0;  // we entered start scanning from the west
  Point current = start;
  const std::size_t cap = 8 * pixel_count + 8;
  bool first = true;
  int first_exit = -1;

  for (std::size_t step = 0; step < cap; ++step) {
    int found = -1;
    for (int k = 0; k < 8; ++k) {
      const int dir = (backtrack + 1 + k) % 8;
      const Point cand{current.x + DX[dir], current.y + DY[dir]};
      if (inside(cand)) {
        found = dir;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    if (first) {
      first_exit = found;
      first = false;
    } else if (current == start && found == first_exit) {
      break;  // re-entering the start the same way: boundary closed
    }
    current = Point{current.x + DX[found], current.y + DY[found]};
    contour.push_back(current);
    backtrack = (found + 4) % 8;  // direction pointing back at the previous pixel
  }

  // The trace revisits start as its last emitted pixel when closed.
  if (contour.size() > 1 && contour.back() == start) contour.pop_back();
  return contour;
}

std::vector<Point> rectangle_outline(const BBox& b) {
  // Degenerate (single-pixel / 1-wide) regions take their pixel-corner rectangle.
  return {Point{b.x_min, b.y_min}, Point{b.x_max + 1, b.y_min}, Point{b.x_max + 1, b.y_max + 1},
          Point{b.x_min, b.y_max + 1}};
}

}  // namespace

std::vector<DefectInstance> extract_components(const MaskImage& mask) {
  const int w = mask.width;
  const int h = mask.height;
  std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<DefectInstance> out;
  std::vector<Point> stack;

  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t si = static_cast<std::size_t>(sy) * w + sx;
      const std::uint8_t cls = mask.classes[si];
      if (cls == 0 || label[si] >= 0) continue;

      const auto id = static_cast<std::int32_t>(out.size());
      DefectInstance inst;
      inst.class_id = cls;

      stack.clear();
      stack.push_back(Point{sx, sy});
      label[si] = id;
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        inst.pixels.push_back(p);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
            if (mask.classes[ni] == cls && label[ni] < 0) {
              label[ni] = id;
              stack.push_back(Point{nx, ny});
            }
          }
        }
      }

      std::sort(inst.pixels.begin(), inst.pixels.end(), [](const Point& a, const Point& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
      });
      inst.bbox = BBox{inst.pixels[0].x, inst.pixels[0].y, inst.pixels[0].x, inst.pixels[0].y};
      for (const Point& p : inst.pixels) {
        inst.bbox.x_min = std::min(inst.bbox.x_min, p.x);
        inst.bbox.x_max = std::max(inst.bbox.x_max, p.x);
        inst.bbox.y_min = std::min(inst.bbox.y_min, p.y);
        inst.bbox.y_max = std::max(inst.bbox.y_max, p.y);
      }

      const Point start = inst.pixels.front();  // uppermost, then leftmost
      auto inside = [&](Point q) {
        if (q.x < 0 || q.y < 0 || q.x >= w || q.y >= h) return false;
        return label[static_cast<std::size_t>(q.y) * w + q.x] == id;
      };
      inst.contour = moore_trace(start, inside, inst.pixels.size());
      if (polygon_signed_area2(inst.contour) == 0) {
        inst.contour = rectangle_outline(inst.bbox);
      }
      if (polygon_signed_area2(inst.contour) < 0) {
        std::reverse(inst.contour.begin(), inst.contour.end());
      }
      out.push_back(std::move(inst));
    }
  }

  std::sort(out.begin(), out.end(), [](const DefectInstance& a, const DefectInstance& b) {
    if (a.bbox.y_min != b.bbox.y_min) return a.bbox.y_min < b.bbox.y_min;
    if (a.bbox.x_min != b.bbox.x_min) return a.bbox.x_min < b.bbox.x_min;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    const Point& pa = a.pixels.front();
    const Point& pb = b.pixels.front();
    return pa.y != pb.y ? pa.y < pb.y : pa.x < pb.x;
  });
  return out;
}

void assign_defect_ids(std::vector<DefectInstance>& instances, const std::string& stem) {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    instances[i].image_stem = stem;
    instances[i].defect_id = stem + "#" + std::to_string(i);
  }
}

double pixel_iou(const DefectInstance& a, const DefectInstance& b) {
  // Both pixel lists are sorted by (y, x).
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t inter = 0;
  while (i < a.pixels.size() && j < b.pixels.size()) {
    const Point& p = a.pixels[i];
    const Point& q = b.pixels[j];
    if (p.y != q.y ? p.y < q.y : p.x < q.x) {
      ++i;
    } else if (p.y != q.y ? q.y < p.y : q.x < p.x) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.pixels.size() + b.pixels.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<MatchResult> match_predictions(const std::vector<DefectInstance>& gt,
                                           const std::vector<DefectInstance>& pred,
                                           double iou_threshold) {
  struct Pair {
    double iou;
    std::size_t gi;
    std::size_t pi;
  };
  std::vector<Pair> pairs;
  for (std::size_t gi = 0; gi < gt.size(); ++gi) {
    for (std::size_t pi = 0; pi < pred.size(); ++pi) {
      const double iou = pixel_iou(gt[gi], pred[pi]);
      if (iou >= iou_threshold) pairs.push_back(Pair{iou, gi, pi});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.gi != b.gi) return a.gi < b.gi;
    return a.pi < b.pi;
  });

  std::vector<MatchResult> results(gt.size());
  for (std::size_t gi = 0; gi < gt.size(); ++gi) {
    results[gi].gt_id = gt[gi].defect_id;
  }
  std::vector<char> gt_taken(gt.size(), 0);
  std::vector<char> pred_taken(pred.size(), 0);
  for (const Pair& p : pairs) {
    if (gt_taken[p.gi] || pred_taken[p.pi]) continue;
    gt_taken[p.gi] = 1;
    pred_taken[p.pi] = 1;
    results[p.gi].matched_pred_id = pred[p.pi].defect_id;
    results[p.gi].iou = p.iou;
    results[p.gi].predicted_class = pred[p.pi].class_id;
  }
  return results;
}

ReasoningTargets build_reasoning_targets(const std::vector<MatchResult>& matches,
                                         const std::vector<DefectInstance>& gt, TaskMode mode) {
  if (gt.empty()) raise(Errc::empty_dataset, "no ground-truth defects");
  if (matches.size() != gt.size()) {
    raise(Errc::length_mismatch, "matches and ground-truth defects differ in length");
  }

  ReasoningTargets t;
  t.mode = mode;
  const std::size_t n = gt.size();
  t.detected.resize(n);
  t.undetected.resize(n);
  const bool with_class = mode != TaskMode::detection;
  if (with_class) {
    t.correctly_classified.resize(n);
    t.misclassified.resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool matched = matches[i].matched_pred_id.has_value();
    t.detected[i] = matched ? 1 : 0;
    t.undetected[i] = matched ? 0 : 1;
    if (with_class) {
      const bool correct = matched && matches[i].predicted_class == gt[i].class_id;
      t.correctly_classified[i] = correct ? 1 : 0;
      t.misclassified[i] = (matched && !correct) ? 1 : 0;
    }
  }
  return t;
}

IngestResult ingest_dataset(const DatasetPaths& paths, TaskMode mode, double iou_threshold,
                            int threads) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    raise(Errc::invalid_config, "iou_threshold must be in (0, 1]");
  }
  std::vector<DatasetEntry> entries = scan_dataset(paths);

  struct PerImage {
    std::vector<DefectInstance> gt;
    std::vector<MatchResult> matches;
  };
  std::vector<PerImage> per_image(entries.size());

  parallel_for(entries.size(), threads, [&](std::size_t i) {
    const DatasetEntry& e = entries[i];
    PerImage r;
    r.gt = extract_components(e.gt);
    assign_defect_ids(r.gt, e.stem);
    std::vector<DefectInstance> pred;
    if (e.pred) {
      pred = extract_components(*e.pred);
      assign_defect_ids(pred, e.stem);
    }
    r.matches = match_predictions(r.gt, pred, iou_threshold);
    per_image[i] = std::move(r);
  });

  IngestResult out;
  std::vector<MatchResult> all_matches;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out.image_paths[entries[i].stem] = entries[i].image_path;
    for (auto& d : per_image[i].gt) out.defects.push_back(std::move(d));
    for (auto& m : per_image[i].matches) all_matches.push_back(std::move(m));
  }
  out.targets = build_reasoning_targets(all_matches, out.defects, mode);
  return out;
}

void write_targets_csv(const std::filesystem::path& path,
                       const std::vector<DefectInstance>& defects,
                       const ReasoningTargets& targets) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::io_failure, "cannot create " + path.string());
  f << "defect_id,image,class_id,detected,undetected,correctly_classified,misclassified\n";
  const bool with_class = targets.mode != TaskMode::detection;
  for (std::size_t i = 0; i < defects.size(); ++i) {
    f << defects[i].defect_id << ',' << defects[i].image_stem << ',' << defects[i].class_id << ','
      << int(targets.detected[i]) << ',' << int(targets.undetected[i]) << ',';
    if (with_class) f << int(targets.correctly_classified[i]);
    f << ',';
    if (with_class) f << int(targets.misclassified[i]);
    f << '\n';
  }
  if (!f.good()) raise(Errc::io_failure, "write failed: " + path.string());
}

TargetsCsv read_targets_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Errc::unreadable_file, "cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) raise(Errc::unreadable_file, "empty targets csv: " + path.string());

  TargetsCsv out;
  bool with_class = true;
  bool first_row = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 7) cells.emplace_back();
    if (first_row) {
      with_class = !cells[5].empty();
      first_row = false;
    }
    out.defect_ids.push_back(cells[0]);
    out.image_stems.push_back(cells[1]);
    out.class_ids.push_back(std::stoi(cells[2]));
    out.targets.detected.push_back(static_cast<std::uint8_t>(std::stoi(cells[3])));
    out.targets.undetected.push_back(static_cast<std::uint8_t>(std::stoi(cells[4])));
    if (with_class) {
      out.targets.correctly_classified.push_back(static_cast<std::uint8_t>(std::stoi(cells[5])));
      out.targets.misclassified.push_back(static_cast<std::uint8_t>(std::stoi(cells[6])));
    }
  }
  out.targets.mode = with_class ? TaskMode::joint : TaskMode::detection;
  if (out.defect_ids.empty()) raise(Errc::empty_dataset, "no rows in " + path.string());
  return out;
}

}  // namespace dscope
