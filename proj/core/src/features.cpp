#include "defectscope/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "defectscope/errors.hpp"
#include "defectscope/geometry.hpp"
#include "defectscope/parallel.hpp"

namespace dscope {

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "area_ratio",    "perimeter_ratio", "compactness", "solidity",
      "extent",        "aspect_ratio",    "eccentricity", "vertex_count_norm",
      "centroid_x",    "centroid_y",      "border_distance", "hue_mean",
      "hue_std",       "sat_mean",        "sat_std",      "val_mean",
      "val_std",       "contrast"};
  return names;
}

int contrast_ring_radius(int width, int height) {
  const double diag = std::hypot(static_cast<double>(width), static_cast<double>(height));
  return std::max(3, static_cast<int>(std::llround(0.02 * diag)));
}

double simplify_epsilon(int width, int height) {
  const double diag = std::hypot(static_cast<double>(width), static_cast<double>(height));
  return std::max(1.0, 0.005 * diag);
}

namespace {

struct Hsv {
  double h;  // [0, 1)
  double s;
  double v;
};

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = r8 / 255.0;
  const double g = g8 / 255.0;
  const double b = b8 / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;

  Hsv out{0.0, 0.0, mx};
  if (mx > 0.0) out.s = delta / mx;
  if (delta > 0.0) {
    double h;
    if (mx == r) {
      h = (g - b) / delta;
    } else if (mx == g) {
      h = 2.0 + (b - r) / delta;
    } else {
      h = 4.0 + (r - g) / delta;
    }
    h /= 6.0;
    if (h < 0.0) h += 1.0;
    if (h >= 1.0) h -= 1.0;
    out.h = h;
  }
  return out;
}

// Offsets of the Euclidean disc of radius d, excluding the origin.
std::vector<Point> disc_offsets(int d) {
  std::vector<Point> offs;
  for (int dy = -d; dy <= d; ++dy) {
    for (int dx = -d; dx <= d; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (dx * dx + dy * dy <= d * d) offs.push_back(Point{dx, dy});
    }
  }
  return offs;
}

}  // namespace

DCVector extract_dc(const RgbImage& image, const DefectInstance& defect) {
  const int w = image.width;
  const int h = image.height;
  for (const Point& p : defect.pixels) {
    if (p.x < 0 || p.y < 0 || p.x >= w || p.y >= h) {
      raise(Errc::out_of_bounds, "defect " + defect.defect_id + " has pixels outside the image");
    }
  }

  const double diag = std::hypot(static_cast<double>(w), static_cast<double>(h));
  const double n = static_cast<double>(defect.pixels.size());
  const BBox& bb = defect.bbox;

  DCVector dc{};

  // --- shape family ---
  const double poly_area =
      std::abs(static_cast<double>(polygon_signed_area2(defect.contour))) / 2.0;
  const double perimeter = polygon_perimeter(defect.contour);
  dc[kAreaRatio] = n / (static_cast<double>(w) * h);
  dc[kPerimeterRatio] = std::min(1.0, perimeter / diag);
  dc[kCompactness] =
      perimeter > 0.0 ? 4.0 * std::numbers::pi * poly_area / (perimeter * perimeter) : 0.0;

  const std::vector<Point> hull = convex_hull(defect.contour);
  const double hull_area = std::abs(static_cast<double>(polygon_signed_area2(hull))) / 2.0;
  dc[kSolidity] = hull_area > 0.0 ? poly_area / hull_area : 0.0;

  dc[kExtent] = n / (static_cast<double>(bb.width()) * bb.height());
  dc[kAspectRatio] = static_cast<double>(std::min(bb.width(), bb.height())) /
                     static_cast<double>(std::max(bb.width(), bb.height()));

  // Central second moments of the pixel set.
  double sx = 0.0;
  double sy = 0.0;
  for (const Point& p : defect.pixels) {
    sx += p.x;
    sy += p.y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double mu20 = 0.0;
  double mu02 = 0.0;
  double mu11 = 0.0;
  for (const Point& p : defect.pixels) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    mu20 += dx * dx;
    mu02 += dy * dy;
    mu11 += dx * dy;
  }
  mu20 /= n;
  mu02 /= n;
  mu11 /= n;
  const double tr = mu20 + mu02;
  const double det = std::sqrt(std::max(0.0, (mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11));
  const double lam1 = (tr + det) / 2.0;
  const double lam2 = (tr - det) / 2.0;
  dc[kEccentricity] = lam1 > 0.0 ? std::sqrt(std::max(0.0, 1.0 - lam2 / lam1)) : 0.0;

  const std::size_t vertices =
      simplified_vertex_count(defect.contour, simplify_epsilon(w, h));
  dc[kVertexCountNorm] = std::min(1.0, static_cast<double>(vertices) / 32.0);

  // --- location family (pixel centers at +0.5) ---
  dc[kCentroidX] = (mx + 0.5) / w;
  dc[kCentroidY] = (my + 0.5) / h;
  const int border = std::min({bb.x_min, bb.y_min, w - 1 - bb.x_max, h - 1 - bb.y_max});
  dc[kBorderDistance] =
      std::clamp(border / (0.5 * std::min(w, h)), 0.0, 1.0);

  // --- color family ---
  double hue_cos = 0.0;
  double hue_sin = 0.0;
  double s_sum = 0.0;
  double s_sq = 0.0;
  double v_sum = 0.0;
  double v_sq = 0.0;
  for (const Point& p : defect.pixels) {
    const std::uint8_t* px = image.px(p.x, p.y);
    const Hsv hsv = rgb_to_hsv(px[0], px[1], px[2]);
    const double ang = 2.0 * std::numbers::pi * hsv.h;
    hue_cos += std::cos(ang);
    hue_sin += std::sin(ang);
    s_sum += hsv.s;
    s_sq += hsv.s * hsv.s;
    v_sum += hsv.v;
    v_sq += hsv.v * hsv.v;
  }
  double hue_mean = std::atan2(hue_sin, hue_cos) / (2.0 * std::numbers::pi);
  if (hue_mean < 0.0) hue_mean += 1.0;
  if (hue_mean >= 1.0) hue_mean -= 1.0;
  dc[kHueMean] = hue_mean;
  const double resultant = std::hypot(hue_cos, hue_sin) / n;
  dc[kHueStd] =
      resultant > 0.0
          ? std::clamp(std::sqrt(std::max(0.0, -2.0 * std::log(resultant))) /
                           (2.0 * std::numbers::pi),
                       0.0, 1.0)
          : 1.0;
  dc[kSatMean] = s_sum / n;
  dc[kSatStd] = std::sqrt(std::max(0.0, s_sq / n - dc[kSatMean] * dc[kSatMean]));
  dc[kValMean] = v_sum / n;
  dc[kValStd] = std::sqrt(std::max(0.0, v_sq / n - dc[kValMean] * dc[kValMean]));

  // --- contrast against the surrounding ring ---
  const int radius = contrast_ring_radius(w, h);
  std::vector<char> in_region(static_cast<std::size_t>(w) * h, 0);
  for (const Point& p : defect.pixels) {
    in_region[static_cast<std::size_t>(p.y) * w + p.x] = 1;
  }
  std::vector<char> in_ring(static_cast<std::size_t>(w) * h, 0);
  const std::vector<Point> offs = disc_offsets(radius);
  for (const Point& p : defect.pixels) {
    for (const Point& o : offs) {
      const int qx = p.x + o.x;
      const int qy = p.y + o.y;
      if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
      const std::size_t qi = static_cast<std::size_t>(qy) * w + qx;
      if (!in_region[qi]) in_ring[qi] = 1;
    }
  }
  double ring_sum = 0.0;
  std::size_t ring_count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (in_ring[static_cast<std::size_t>(y) * w + x]) {
        const std::uint8_t* px = image.px(x, y);
        ring_sum += std::max({px[0], px[1], px[2]}) / 255.0;
        ++ring_count;
      }
    }
  }
  dc[kContrast] =
      ring_count > 0 ? std::abs(dc[kValMean] - ring_sum / static_cast<double>(ring_count)) : 0.0;

  return dc;
}

std::vector<DCVector> extract_all_features(const IngestResult& ingest, int threads) {
  // Group defect row indices by image so each PNG decodes once.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < ingest.defects.size(); ++i) {
    const std::string& stem = ingest.defects[i].image_stem;
    if (groups.empty() || groups.back().first != stem) {
      groups.emplace_back(stem, std::vector<std::size_t>{});
    }
    groups.back().second.push_back(i);
  }

  std::vector<DCVector> rows(ingest.defects.size());
  parallel_for(groups.size(), threads, [&](std::size_t g) {
    const auto& [stem, indices] = groups[g];
    const RgbImage image = read_rgb_png(ingest.image_paths.at(stem));
    for (const std::size_t i : indices) {
      rows[i] = extract_dc(image, ingest.defects[i]);
    }
  });
  return rows;
}

double quantize_dc(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return std::strtod(buf, nullptr);
}

AssembledData assemble_matrix(const std::vector<DefectInstance>& defects,
                              const std::vector<DCVector>& vectors,
                              const ReasoningTargets& targets) {
  if (defects.empty()) raise(Errc::empty_dataset, "no defects to assemble");
  if (vectors.size() != defects.size()) {
    raise(Errc::length_mismatch, "characteristic vectors do not cover every defect");
  }
  if (targets.detected.size() != defects.size()) {
    raise(Errc::length_mismatch, "targets do not cover every defect");
  }

  AssembledData out;
  out.matrix.feature_list.assign(feature_names().begin(), feature_names().end());
  out.matrix.id_list.reserve(defects.size());
  out.matrix.image_stems.reserve(defects.size());
  out.matrix.rows.reserve(defects.size());
  for (std::size_t i = 0; i < defects.size(); ++i) {
    out.matrix.id_list.push_back(defects[i].defect_id);
    out.matrix.image_stems.push_back(defects[i].image_stem);
    DCVector row = vectors[i];
    for (double& v : row) v = quantize_dc(v);
    out.matrix.rows.push_back(row);
  }

  out.targets.emplace_back("detected", targets.detected);
  out.targets.emplace_back("undetected", targets.undetected);
  if (targets.mode != TaskMode::detection) {
    out.targets.emplace_back("correctly_classified", targets.correctly_classified);
    out.targets.emplace_back("misclassified", targets.misclassified);
  }
  return out;
}

FeatureRange compute_feature_range(const DCMatrix& matrix) {
  if (matrix.rows.empty()) raise(Errc::empty_matrix, "feature range of an empty matrix");
  FeatureRange range;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    double lo = matrix.rows[0][f];
    double hi = matrix.rows[0][f];
    for (const DCVector& row : matrix.rows) {
      lo = std::min(lo, row[f]);
      hi = std::max(hi, row[f]);
    }
    range.min_max[f] = {lo, hi};
  }
  return range;
}

void write_dc_matrix_csv(const std::filesystem::path& path, const DCMatrix& matrix) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::io_failure, "cannot create " + path.string());
  f << "defect_id,image";
  for (const std::string& name : matrix.feature_list) f << ',' << name;
  f << '\n';
  char buf[40];
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    f << matrix.id_list[i] << ',' << matrix.image_stems[i];
    for (const double v : matrix.rows[i]) {
      std::snprintf(buf, sizeof(buf), "%.9g", v);
      f << ',' << buf;
    }
    f << '\n';
  }
  if (!f.good()) raise(Errc::io_failure, "write failed: " + path.string());
}

DCMatrix read_dc_matrix_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Errc::unreadable_file, "cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) raise(Errc::unreadable_file, "empty matrix csv: " + path.string());

  DCMatrix out;
  out.feature_list.assign(feature_names().begin(), feature_names().end());
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 2 + kFeatureCount) {
      raise(Errc::unreadable_file, "malformed row in " + path.string());
    }
    out.id_list.push_back(cells[0]);
    out.image_stems.push_back(cells[1]);
    DCVector row{};
    for (std::size_t fcol = 0; fcol < kFeatureCount; ++fcol) {
      row[fcol] = std::strtod(cells[2 + fcol].c_str(), nullptr);
    }
    out.rows.push_back(row);
  }
  if (out.rows.empty()) raise(Errc::empty_matrix, "no rows in " + path.string());
  return out;
}

}  // namespace dscope
