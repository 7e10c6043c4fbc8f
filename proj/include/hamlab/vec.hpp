#pragma once
// Small dense-vector helpers used throughout. Phase-space states are plain
// std::vector<double>; dimensions are tiny (2n with n <= 3 in practice) so
// nothing here tries to be clever.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hamlab {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

inline Vec operator+(Vec a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec+: size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec-: size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec operator*(double c, Vec a) {
  for (double& x : a) x *= c;
  return a;
}

// y += c*x
inline void axpy(double c, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

}  // namespace hamlab
