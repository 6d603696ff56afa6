#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dscope {

struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Inclusive axis-aligned pixel bounds.
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = -1;
  int y_max = -1;

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Twice the signed shoelace area of a closed polygon (last edge implied).
// Positive means counter-clockwise in the stored coordinate convention.
long long polygon_signed_area2(std::span<const Point> poly);

// Total edge length of a closed polygon, including the closing edge.
double polygon_perimeter(std::span<const Point> poly);

// Convex hull (Andrew monotone chain), counter-clockwise, collinear points dropped.
std::vector<Point> convex_hull(std::vector<Point> points);

// Vertices surviving Douglas-Peucker simplification of a closed polygon.
std::size_t simplified_vertex_count(std::span<const Point> poly, double epsilon);

}  // namespace dscope
