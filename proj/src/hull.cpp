#include "hamlab/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hamlab {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

std::vector<Point2> convex_hull_2d(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Point2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

bool hull_contains(const std::vector<Point2>& hull, const Point2& pt, double tol) {
  if (hull.empty()) return false;
  if (hull.size() == 1)
    return std::hypot(pt[0] - hull[0][0], pt[1] - hull[0][1]) <= tol;
  if (hull.size() == 2) {
    // Distance to the segment.
    const double ex = hull[1][0] - hull[0][0], ey = hull[1][1] - hull[0][1];
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0.0
                   ? ((pt[0] - hull[0][0]) * ex + (pt[1] - hull[0][1]) * ey) / len2
                   : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = pt[0] - (hull[0][0] + t * ex), dy = pt[1] - (hull[0][1] + t * ey);
    return std::hypot(dx, dy) <= tol;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    const double c = cross(a, b, pt);
    const double edge = std::hypot(b[0] - a[0], b[1] - a[1]);
    // Signed distance left of edge ab; negative means outside for a CCW hull.
    if (edge > 0.0 && c / edge < -tol) return false;
  }
  return true;
}

double inscribed_radius_about_origin(const std::vector<Point2>& hull) {
  if (hull.size() < 3) return 0.0;
  double radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    const double c = cross(a, b, {0.0, 0.0});
    const double edge = std::hypot(b[0] - a[0], b[1] - a[1]);
    if (!(edge > 0.0)) continue;
    const double d = c / edge;
    if (d < 0.0) return 0.0;  // origin outside
    radius = std::min(radius, d);
  }
  return std::isfinite(radius) ? radius : 0.0;
}

}  // namespace hamlab
