#include "hamlab/phase.hpp"

#include <cmath>
#include <stdexcept>

namespace hamlab {

Vec LiftedPoint::flat() const {
  Vec x(q);
  x.insert(x.end(), p.begin(), p.end());
  return x;
}

LiftedPoint LiftedPoint::from_flat(const Vec& x) {
  if (x.size() % 2 != 0) throw std::invalid_argument("from_flat: odd state size");
  const std::size_t n = x.size() / 2;
  return {Vec(x.begin(), x.begin() + n), Vec(x.begin() + n, x.end())};
}

double HomotopyClass::norm() const {
  std::int64_t ss = 0;
  for (std::int64_t k : e) ss += k * k;
  return std::sqrt(static_cast<double>(ss));
}

bool HomotopyClass::is_zero() const {
  for (std::int64_t k : e)
    if (k != 0) return false;
  return true;
}

bool FundamentalDomain::contains(const LiftedPoint& x) const {
  if (x.dim() != n) return false;
  for (double qi : x.q)
    if (std::fabs(qi) > 0.5) return false;
  return norm2(x.p) < 1.0;
}

BasePoint project(const LiftedPoint& x) {
  Vec q(x.q);
  for (double& qi : q) qi -= std::floor(qi);
  return {q, x.p};
}

LiftedPoint deck_transform(const LiftedPoint& x, const HomotopyClass& e) {
  if (x.dim() != e.dim())
    throw std::invalid_argument("deck_transform: dimension mismatch");
  LiftedPoint y = x;
  for (int i = 0; i < x.dim(); ++i) y.q[i] += static_cast<double>(e.e[i]);
  return y;
}

std::vector<LiftedPoint> sample_fundamental_domain(int n, int resolution,
                                                   double momentum_cap) {
  if (n < 1) throw std::invalid_argument("sample_fundamental_domain: n < 1");
  if (resolution < 1)
    throw std::invalid_argument("sample_fundamental_domain: resolution < 1");
  if (!(momentum_cap > 0.0) || !(momentum_cap < 1.0))
    throw std::invalid_argument("sample_fundamental_domain: cap outside (0,1)");

  auto axis = [resolution](double half) {
    Vec v;
    if (resolution == 1) {
      v.push_back(0.0);
    } else {
      for (int j = 0; j < resolution; ++j)
        v.push_back(-half + 2.0 * half * j / (resolution - 1));
    }
    return v;
  };
  const Vec qaxis = axis(0.5);
  const Vec paxis = axis(momentum_cap);

  std::vector<LiftedPoint> out;
  std::vector<int> digit(2 * n, 0);
  while (true) {
    LiftedPoint x{Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) x.q[i] = qaxis[digit[i]];
    for (int i = 0; i < n; ++i) x.p[i] = paxis[digit[n + i]];
    if (norm2(x.p) <= momentum_cap) out.push_back(std::move(x));
    int axis_i = 2 * n - 1;
    while (axis_i >= 0 && ++digit[axis_i] == resolution) digit[axis_i--] = 0;
    if (axis_i < 0) break;
  }
  return out;
}

}  // namespace hamlab
