#pragma once
// Exact planar convex-hull helpers for the rotation-set estimator: monotone
// chain hull, point membership with tolerance, and the radius of the largest
// ball about the origin contained in the hull.

#include <array>
#include <vector>

namespace hamlab {

using Point2 = std::array<double, 2>;

// Convex hull in counterclockwise order, collinear points dropped. One or two
// distinct input points yield a degenerate hull of that size.
std::vector<Point2> convex_hull_2d(std::vector<Point2> pts);

// True when pt lies in the hull, allowing it to sit outside by at most tol.
bool hull_contains(const std::vector<Point2>& hull, const Point2& pt, double tol);

// Radius of the largest ball centred at the origin inside the hull; zero when
// the origin is outside or the hull is degenerate.
double inscribed_radius_about_origin(const std::vector<Point2>& hull);

}  // namespace hamlab
