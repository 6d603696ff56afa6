#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace dscope::testing {

std::vector<OracleComponent> oracle_components(const MaskImage& mask) {
  const int w = mask.width;
  const int h = mask.height;
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<OracleComponent> out;

  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t si = static_cast<std::size_t>(sy) * w + sx;
      if (seen[si] || mask.classes[si] == 0) continue;
      const std::uint8_t cls = mask.classes[si];

      OracleComponent comp;
      comp.class_id = cls;
      std::deque<Point> queue;
      queue.push_back(Point{sx, sy});
      seen[si] = 1;
      while (!queue.empty()) {
        const Point p = queue.front();
        queue.pop_front();
        comp.pixels.push_back(p);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
            if (!seen[ni] && mask.classes[ni] == cls) {
              seen[ni] = 1;
              queue.push_back(Point{nx, ny});
            }
          }
        }
      }
      std::sort(comp.pixels.begin(), comp.pixels.end(), [](const Point& a, const Point& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
      });
      out.push_back(std::move(comp));
    }
  }

  std::sort(out.begin(), out.end(), [](const OracleComponent& a, const OracleComponent& b) {
    const Point& pa = a.pixels.front();
    const Point& pb = b.pixels.front();
    int ay = pa.y;
    int ax = pa.x;
    int by = pb.y;
    int bx = pb.x;
    for (const Point& p : a.pixels) {
      ay = std::min(ay, p.y);
      ax = std::min(ax, p.x);
    }
    for (const Point& p : b.pixels) {
      by = std::min(by, p.y);
      bx = std::min(bx, p.x);
    }
    if (ay != by) return ay < by;
    if (ax != bx) return ax < bx;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    return pa.y != pb.y ? pa.y < pb.y : pa.x < pb.x;
  });
  return out;
}

namespace {

long long cross_ll(const Point& o, const Point& a, const Point& b) {
  return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
         static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

long long dist2(const Point& a, const Point& b) {
  return static_cast<long long>(a.x - b.x) * (a.x - b.x) +
         static_cast<long long>(a.y - b.y) * (a.y - b.y);
}

// Gift wrapping; returns hull area * 2.
long long hull_area2_jarvis(const std::vector<Point>& input) {
  std::vector<Point> pts = input;
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0;

  std::vector<Point> hull;
  const Point start = pts.front();  // lowest x, then lowest y
  Point on_hull = start;
  do {
    hull.push_back(on_hull);
    Point best = pts[0];
    for (const Point& candidate : pts) {
      if (candidate == on_hull) continue;
      if (best == on_hull) {
        best = candidate;
        continue;
      }
      const long long c = cross_ll(on_hull, best, candidate);
      if (c < 0 || (c == 0 && dist2(on_hull, candidate) > dist2(on_hull, best))) {
        best = candidate;
      }
    }
    on_hull = best;
  } while (!(on_hull == start) && hull.size() <= pts.size());

  long long area2 = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    area2 += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
  }
  return std::llabs(area2);
}

double point_segment_dist(const Point& p, const Point& a, const Point& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  if (len2 == 0.0) return std::hypot(static_cast<double>(p.x - a.x), static_cast<double>(p.y - a.y));
  double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

void dp_keep(const std::vector<Point>& pts, std::size_t lo, std::size_t hi, double eps,
             std::set<std::size_t>& kept) {
  if (hi <= lo + 1) return;
  double best = -1.0;
  std::size_t arg = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double d = point_segment_dist(pts[i], pts[lo], pts[hi]);
    if (d > best) {
      best = d;
      arg = i;
    }
  }
  if (best > eps) {
    kept.insert(arg);
    dp_keep(pts, lo, arg, eps, kept);
    dp_keep(pts, arg, hi, eps, kept);
  }
}

std::size_t oracle_vertex_count(const std::vector<Point>& poly, double eps) {
  const std::size_t n = poly.size();
  if (n <= 3) return n;
  std::size_t far = 1;
  long long best = -1;
  for (std::size_t i = 1; i < n; ++i) {
    const long long d = dist2(poly[i], poly[0]);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  std::set<std::size_t> kept{0, far};
  dp_keep(poly, 0, far, eps, kept);
  std::vector<Point> wrap(poly.begin() + static_cast<std::ptrdiff_t>(far), poly.end());
  wrap.push_back(poly[0]);
  std::set<std::size_t> kept2{0, wrap.size() - 1};
  dp_keep(wrap, 0, wrap.size() - 1, eps, kept2);
  for (const std::size_t k : kept2) {
    if (k != 0 && k != wrap.size() - 1) kept.insert(far + k);
  }
  return kept.size();
}

void hsv_of(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8, double& h, double& s, double& v) {
  const double r = r8 / 255.0;
  const double g = g8 / 255.0;
  const double b = b8 / 255.0;
  const double mx = std::max(r, std::max(g, b));
  const double mn = std::min(r, std::min(g, b));
  const double d = mx - mn;
  v = mx;
  s = mx > 0.0 ? d / mx : 0.0;
  double deg = 0.0;
  if (d > 0.0) {
    if (mx == r) {
      deg = 60.0 * ((g - b) / d);
    } else if (mx == g) {
      deg = 60.0 * (2.0 + (b - r) / d);
    } else {
      deg = 60.0 * (4.0 + (r - g) / d);
    }
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
  }
  h = deg / 360.0;
}

}  // namespace

DCVector oracle_dc(const RgbImage& image, const DefectInstance& defect) {
  const double pi = 3.14159265358979323846;
  const int w = image.width;
  const int h = image.height;
  const double diag = std::sqrt(static_cast<double>(w) * w + static_cast<double>(h) * h);
  const double n = static_cast<double>(defect.pixels.size());
  DCVector dc{};

  // Polygon area and perimeter from the closed contour.
  double area2 = 0.0;
  double perim = 0.0;
  const std::size_t vcount = defect.contour.size();
  for (std::size_t i = 0; i < vcount; ++i) {
    const Point& a = defect.contour[i];
    const Point& b = defect.contour[(i + 1) % vcount];
    area2 += static_cast<double>(a.x) * b.y - static_cast<double>(b.x) * a.y;
    perim += std::sqrt(static_cast<double>(dist2(a, b)));
  }
  const double poly_area = std::abs(area2) / 2.0;

  int x_min = defect.pixels[0].x;
  int x_max = x_min;
  int y_min = defect.pixels[0].y;
  int y_max = y_min;
  for (const Point& p : defect.pixels) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  const double bw = x_max - x_min + 1;
  const double bh = y_max - y_min + 1;

  dc[kAreaRatio] = n / (static_cast<double>(w) * h);
  dc[kPerimeterRatio] = std::min(1.0, perim / diag);
  dc[kCompactness] = perim > 0.0 ? 4.0 * pi * poly_area / (perim * perim) : 0.0;
  const double hull_area = static_cast<double>(hull_area2_jarvis(defect.contour)) / 2.0;
  dc[kSolidity] = hull_area > 0.0 ? poly_area / hull_area : 0.0;
  dc[kExtent] = n / (bw * bh);
  dc[kAspectRatio] = std::min(bw, bh) / std::max(bw, bh);

  double sx = 0.0;
  double sy = 0.0;
  for (const Point& p : defect.pixels) {
    sx += p.x;
    sy += p.y;
  }
  const double cx = sx / n;
  const double cy = sy / n;
  double mu20 = 0.0;
  double mu02 = 0.0;
  double mu11 = 0.0;
  for (const Point& p : defect.pixels) {
    mu20 += (p.x - cx) * (p.x - cx);
    mu02 += (p.y - cy) * (p.y - cy);
    mu11 += (p.x - cx) * (p.y - cy);
  }
  mu20 /= n;
  mu02 /= n;
  mu11 /= n;
  const double trace = mu20 + mu02;
  const double root = std::sqrt(std::max(0.0, (mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11));
  const double l1 = (trace + root) / 2.0;
  const double l2 = (trace - root) / 2.0;
  dc[kEccentricity] = l1 > 0.0 ? std::sqrt(std::max(0.0, 1.0 - l2 / l1)) : 0.0;

  const double eps = std::max(1.0, 0.005 * diag);
  dc[kVertexCountNorm] =
      std::min(1.0, static_cast<double>(oracle_vertex_count(defect.contour, eps)) / 32.0);

  dc[kCentroidX] = (cx + 0.5) / w;
  dc[kCentroidY] = (cy + 0.5) / h;
  const double border = std::min(std::min(x_min, y_min), std::min(w - 1 - x_max, h - 1 - y_max));
  dc[kBorderDistance] = std::clamp(border / (0.5 * std::min(w, h)), 0.0, 1.0);

  double cosum = 0.0;
  double sisum = 0.0;
  double ssum = 0.0;
  double ssq = 0.0;
  double vsum = 0.0;
  double vsq = 0.0;
  for (const Point& p : defect.pixels) {
    const std::uint8_t* px = image.px(p.x, p.y);
    double hh;
    double ss;
    double vv;
    hsv_of(px[0], px[1], px[2], hh, ss, vv);
    cosum += std::cos(2.0 * pi * hh);
    sisum += std::sin(2.0 * pi * hh);
    ssum += ss;
    ssq += ss * ss;
    vsum += vv;
    vsq += vv * vv;
  }
  double hmean = std::atan2(sisum, cosum) / (2.0 * pi);
  if (hmean < 0.0) hmean += 1.0;
  if (hmean >= 1.0) hmean -= 1.0;
  dc[kHueMean] = hmean;
  const double rbar = std::sqrt(cosum * cosum + sisum * sisum) / n;
  dc[kHueStd] = rbar > 0.0
                    ? std::clamp(std::sqrt(std::max(0.0, -2.0 * std::log(rbar))) / (2.0 * pi), 0.0, 1.0)
                    : 1.0;
  dc[kSatMean] = ssum / n;
  dc[kSatStd] = std::sqrt(std::max(0.0, ssq / n - dc[kSatMean] * dc[kSatMean]));
  dc[kValMean] = vsum / n;
  dc[kValStd] = std::sqrt(std::max(0.0, vsq / n - dc[kValMean] * dc[kValMean]));

  // Contrast ring by brute-force nearest-distance scan.
  const double d_diag = std::sqrt(static_cast<double>(w) * w + static_cast<double>(h) * h);
  const int radius = std::max(3, static_cast<int>(std::llround(0.02 * d_diag)));
  std::vector<char> in_region(static_cast<std::size_t>(w) * h, 0);
  for (const Point& p : defect.pixels) in_region[static_cast<std::size_t>(p.y) * w + p.x] = 1;
  double ring_sum = 0.0;
  std::size_t ring_n = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (in_region[static_cast<std::size_t>(y) * w + x]) continue;
      bool close = false;
      for (const Point& p : defect.pixels) {
        const int dx = p.x - x;
        const int dy = p.y - y;
        if (dx * dx + dy * dy <= radius * radius) {
          close = true;
          break;
        }
      }
      if (close) {
        const std::uint8_t* px = image.px(x, y);
        double hh;
        double ss;
        double vv;
        hsv_of(px[0], px[1], px[2], hh, ss, vv);
        ring_sum += vv;
        ++ring_n;
      }
    }
  }
  dc[kContrast] = ring_n > 0 ? std::abs(dc[kValMean] - ring_sum / static_cast<double>(ring_n)) : 0.0;
  return dc;
}

std::optional<OracleSplit> oracle_best_split(const DCMatrix& matrix,
                                             const std::vector<std::uint32_t>& samples,
                                             const std::vector<int>& candidate_dcs,
                                             const std::vector<std::uint8_t>& target,
                                             double weight0, double weight1) {
  auto impurity = [](double w0, double w1) {
    const double w = w0 + w1;
    if (w <= 0.0) return 0.0;
    return 1.0 - (w0 / w) * (w0 / w) - (w1 / w) * (w1 / w);
  };

  double p0 = 0.0;
  double p1 = 0.0;
  for (const std::uint32_t s : samples) {
    if (target[s]) {
      p1 += weight1;
    } else {
      p0 += weight0;
    }
  }
  const double parent = impurity(p0, p1);
  const double total = p0 + p1;

  std::optional<OracleSplit> best;
  for (const int dc : candidate_dcs) {
    std::vector<double> values;
    for (const std::uint32_t s : samples) values.push_back(matrix.rows[s][dc]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double thr = (values[i] + values[i + 1]) / 2.0;
      double l0 = 0.0;
      double l1 = 0.0;
      double r0 = 0.0;
      double r1 = 0.0;
      for (const std::uint32_t s : samples) {
        const bool left = matrix.rows[s][dc] <= thr;
        const double wgt = target[s] ? weight1 : weight0;
        if (left) {
          (target[s] ? l1 : l0) += wgt;
        } else {
          (target[s] ? r1 : r0) += wgt;
        }
      }
      const double gain =
          parent - ((l0 + l1) * impurity(l0, l1) + (r0 + r1) * impurity(r0, r1)) / total;
      if (!best || gain > best->gain ||
          (gain == best->gain &&
           (dc < best->dc_index || (dc == best->dc_index && thr < best->threshold)))) {
        best = OracleSplit{dc, thr, gain};
      }
    }
  }
  if (best && best->gain <= 0.0) return std::nullopt;
  return best;
}

std::vector<double> oracle_mdi(const Forest& forest) {
  auto impurity = [](double w0, double w1) {
    const double w = w0 + w1;
    if (w <= 0.0) return 0.0;
    return 1.0 - (w0 / w) * (w0 / w) - (w1 / w) * (w1 / w);
  };

  std::vector<double> totals(kFeatureCount, 0.0);
  for (const Tree& tree : forest.trees) {
    const double root_w = tree.nodes[0].count0 + tree.nodes[0].count1;
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) continue;
      const TreeNode& l = tree.nodes[node.left];
      const TreeNode& r = tree.nodes[node.right];
      const double w = node.count0 + node.count1;
      const double lw = l.count0 + l.count1;
      const double rw = r.count0 + r.count1;
      const double gain = impurity(node.count0, node.count1) -
                          (lw * impurity(l.count0, l.count1) + rw * impurity(r.count0, r.count1)) / w;
      totals[node.dc_index] += (w / root_w) * gain;
    }
  }
  return totals;
}

}  // namespace dscope::testing
