#include "defectscope/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace dscope {

long long polygon_signed_area2(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0;
  long long acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    acc += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
  }
  return acc;
}

double polygon_perimeter(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    total += std::hypot(static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y));
  }
  return total;
}

namespace {

long long cross(const Point& o, const Point& a, const Point& b) {
  return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
         static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

// Perpendicular distance from p to segment [a, b].
double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return std::hypot(static_cast<double>(p.x - a.x), static_cast<double>(p.y - a.y));
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const double px = a.x + t * dx;
  const double py = a.y + t * dy;
  return std::hypot(p.x - px, p.y - py);
}

// Marks vertices of the open polyline poly[first..last] kept by Douglas-Peucker.
void dp_mark(std::span<const Point> poly, std::size_t first, std::size_t last, double epsilon,
             std::vector<char>& keep) {
  if (last <= first + 1) return;
  double max_dist = -1.0;
  std::size_t split = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = segment_distance(poly[i], poly[first], poly[last]);
    if (d > max_dist) {
      max_dist = d;
      split = i;
    }
  }
  if (max_dist > epsilon) {
    keep[split] = 1;
    dp_mark(poly, first, split, epsilon, keep);
    dp_mark(poly, split, last, epsilon, keep);
  }
}

}  // namespace

std::vector<Point> convex_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  if (n < 3) return points;

  std::vector<Point> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::size_t simplified_vertex_count(std::span<const Point> poly, double epsilon) {
  const std::size_t n = poly.size();
  if (n <= 3) return n;

  // Closed polygon: anchor at vertex 0 and the vertex farthest from it,
  // then simplify the two open arcs between the anchors.
  std::size_t far = 1;
  double far_dist = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double dx = poly[i].x - poly[0].x;
    const double dy = poly[i].y - poly[0].y;
    const double d = dx * dx + dy * dy;
    if (d > far_dist) {
      far_dist = d;
      far = i;
    }
  }

  std::vector<char> keep(n + 1, 0);
  keep[0] = keep[far] = 1;
  dp_mark(poly, 0, far, epsilon, keep);

  // Second arc wraps around: view it as poly[far..n-1] + poly[0].
  std::vector<Point> arc(poly.begin() + static_cast<std::ptrdiff_t>(far), poly.end());
  arc.push_back(poly[0]);
  std::vector<char> keep2(arc.size(), 0);
  keep2.front() = keep2.back() = 1;
  dp_mark(arc, 0, arc.size() - 1, epsilon, keep2);
  for (std::size_t i = 1; i + 1 < arc.size(); ++i) {
    if (keep2[i]) keep[far + i] = 1;
  }

  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += keep[i] ? 1u : 0u;
  return count;
}

}  // namespace dscope
