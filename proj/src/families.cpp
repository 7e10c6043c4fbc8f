#include "hamlab/families.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hamlab {

namespace {

struct Sampled {
  std::vector<double> r, f, fp, fpp;
};

Sampled sample(const ProfileFunction& f, double r0, double r1, int grid) {
  Sampled s;
  s.r.resize(grid + 1);
  for (int j = 0; j <= grid; ++j) s.r[j] = r0 + (r1 - r0) * j / grid;
  s.f.resize(grid + 1);
  s.fp.resize(grid + 1);
  s.fpp.resize(grid + 1);
  f.eval_many(s.r.data(), s.r.size(), s.f.data(), s.fp.data(), s.fpp.data());
  return s;
}

// Interval layout of one member. For -1 < s < 1 the s = -1 geometry is kept
// frozen and only the levels move; the family stays pointwise monotone in s
// because shapes jump upward across the regime seams.
struct Layout {
  double K;        // head value f(0)
  double L;        // plateau level, min(s, 0)
  double a1, a2;   // cap end, down-ramp end
  double b2, b1;   // up-ramp start and end (L < 0 only)
  bool high;       // s >= 1 branch (single ramp straight to zero)
};

Layout layout_for(FamilyKind kind, double s, double c) {
  Layout g{};
  g.K = c + std::exp(s);
  g.L = std::min(s, 0.0);
  g.high = s >= 1.0;
  if (g.high) {
    if (kind == FamilyKind::zero_section) {
      g.a1 = 1.0 - 1.0 / (4.0 * s);
      g.a2 = 1.0 - 1.0 / (8.0 * s);
    } else {
      g.a1 = 1.0 - 3.0 / (8.0 * s);
      g.a2 = 1.0 - 1.0 / (8.0 * s);
    }
    return g;
  }
  const double m = std::max(-s, 1.0);  // frozen at the s = -1 layout mid-range
  if (kind == FamilyKind::zero_section) {
    g.a1 = 1.0 / (8.0 * m);
    g.a2 = 1.0 / (4.0 * m);
    g.b2 = 1.0 - 1.0 / (4.0 * m);
    g.b1 = 1.0 - 1.0 / (8.0 * m);
  } else {
    g.a1 = 1.0 / (8.0 * m);
    g.a2 = 3.0 / (8.0 * m);
    g.b2 = 1.0 - 3.0 / (8.0 * m);
    g.b1 = 1.0 - 1.0 / (8.0 * m);
  }
  return g;
}

ProfileFunction build_member_profile(FamilyKind kind, double s, double c) {
  const Layout g = layout_for(kind, s, c);
  std::vector<Knot> knots;
  if (kind == FamilyKind::zero_section) {
    emit_parabola(knots, 0.0, g.a1, g.K);
    emit_parabola_release(knots, g.a1, g.a2, g.K, g.L);
  } else {
    emit_constant(knots, 0.0, g.a1, g.K);
    emit_step(knots, g.a1, g.a2, g.K, g.L);
  }
  if (!g.high && g.L < 0.0) {
    emit_constant(knots, g.a2, g.b2, g.L);
    emit_step(knots, g.b2, g.b1, g.L, 0.0);
  } else if (!g.high && g.L == 0.0) {
    // release/step already landed at zero; support ends at a2
  }
  // Force the final knot state to exact zeros (construction lands there up to
  // round-off; from_knots requires exactness).
  knots.back() = {knots.back().r, 0.0, 0.0, 0.0};
  return ProfileFunction::from_knots(std::move(knots));
}

[[noreturn]] void fail(const std::string& clause) { throw FamilyClauseViolation(clause); }

void check_identity(const ProfileFunction& f, double r0, double r1, int grid,
                    double K, bool parabola, double level,
                    const std::string& clause) {
  if (!(r1 > r0)) return;
  const Sampled s = sample(f, r0, r1, grid);
  const double tol = 1e-9 * std::max({1.0, std::fabs(K), std::fabs(level)});
  for (std::size_t j = 0; j < s.r.size(); ++j) {
    const double want = parabola ? K * (1.0 - s.r[j] * s.r[j]) : level;
    if (std::fabs(s.f[j] - want) > tol) fail(clause);
  }
}

void check_curvature_split(const ProfileFunction& f, double ra, double rb,
                           const std::string& clause) {
  // Ramp curvature: strictly negative on the open first half, strictly
  // positive on the open second half, vanishing only at ends and midpoint.
  const double mid = 0.5 * (ra + rb);
  const int grid = 64;
  for (int j = 1; j < grid; ++j) {
    const double r1 = ra + (mid - ra) * j / grid;
    if (!(f.deriv2(r1) < 0.0)) fail(clause);
    const double r2 = mid + (rb - mid) * j / grid;
    if (!(f.deriv2(r2) > 0.0)) fail(clause);
  }
}

}  // namespace

std::vector<double> slope_level_crossings(const ProfileFunction& f, double level,
                                          int grid) {
  const double end = f.support_end();
  std::vector<double> r(grid + 1), fp(grid + 1);
  for (int j = 0; j <= grid; ++j) r[j] = end * j / grid;
  f.eval_many(r.data(), r.size(), nullptr, fp.data(), nullptr);
  std::vector<double> roots;
  for (int j = 0; j < grid; ++j) {
    const double ga = fp[j] - level, gb = fp[j + 1] - level;
    if (ga == 0.0) {
      if (r[j] > 0.0) roots.push_back(r[j]);
      continue;
    }
    if (ga * gb < 0.0) {
      double lo = r[j], hi = r[j + 1];
      double glo = ga;
      // Run the bracket all the way down to adjacent doubles. Near steep
      // ramps the curvature can reach e^s scale, so any fixed radius
      // tolerance leaves an O(1) error in values evaluated at the root;
      // machine resolution keeps that error at round-off.
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = f.deriv(mid) - level;
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((glo < 0.0) == (gm < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
  }
  return roots;
}

void verify_family_member(const FamilyMember& m, int grid) {
  const ProfileFunction& f = m.f;
  const Layout g = layout_for(m.kind, m.s, m.c);
  const double head = f.value(0.0);

  if (!(head > m.c)) fail("head value stays above c");
  if (m.kind == FamilyKind::zero_section && !(f.deriv2(0.0) < 0.0))
    fail("cap curvature negative at r = 0");

  // Regime shape identities.
  const bool parab = m.kind == FamilyKind::zero_section;
  check_identity(f, 0.0, g.a1, grid / 4, g.K, parab, g.K,
                 parab ? "parabolic cap" : "flat cap");
  if (!g.high && g.L < 0.0 && m.s <= -1.0)
    check_identity(f, g.a2, g.b2, grid / 4, g.K, false, g.L, "plateau at level s");
  {
    // Vanishes from the last support knot on (and that knot sits inside r < 1).
    const double end = f.support_end();
    if (!(end < 1.0)) fail("support ends inside the open disc");
    for (int j = 0; j <= 8; ++j) {
      const Jet jet = f.eval(end + (1.0 - end) * j / 8.0);
      if (jet.f != 0.0 || jet.fp != 0.0 || jet.fpp != 0.0)
        fail("vanishes beyond the support knot");
    }
  }

  // Slope signs and interior critical points.
  const Sampled s = sample(f, 0.0, f.support_end(), grid);
  for (std::size_t j = 0; j < s.r.size(); ++j) {
    const double r = s.r[j], fp = s.fp[j], fv = s.f[j];
    if (m.kind == FamilyKind::zero_section) {
      if (g.high || g.L == 0.0) {
        if (fp > 1e-12) fail("nonpositive slope");
      } else {
        if (r <= 0.5 && fp > 1e-12) fail("nonpositive slope left of 1/2");
        if (r >= 0.5 && fp < -1e-12) fail("nonnegative slope right of 1/2");
      }
      if (r > 0.0 && std::fabs(fp) < 1e-9 && fv > 1e-9)
        fail("only positive-value critical point is r = 0");
    } else {
      if (g.high || g.L == 0.0) {
        if (fp > 1e-12) fail("nonpositive slope");
      } else {
        if (r <= 0.5 && fp > 1e-12) fail("nonpositive slope left of 1/2");
        if (r >= 0.5 && fp < -1e-12) fail("nonnegative slope right of 1/2");
      }
    }
  }

  if (m.kind == FamilyKind::nonzero_class) {
    check_curvature_split(f, g.a1, g.a2, "down-ramp curvature split");
    if (head > m.ell) {
      const auto down = slope_level_crossings(f, -m.ell);
      if (down.size() != 2) fail("exactly two crossings of slope -ell");
      if (!(f.deriv2(down[0]) < 0.0 && f.deriv2(down[1]) > 0.0))
        fail("crossing curvature signs");
    }
    for (double r : slope_level_crossings(f, m.ell))
      if (!(f.value(r) < -1e-12)) fail("positive-slope crossings sit below zero");
  }
}

void verify_family_monotone(const FamilyMember& lo, const FamilyMember& hi, int grid,
                            double slack) {
  if (!(lo.s < hi.s)) fail("monotone check needs s_lo < s_hi");
  const double end = std::max(lo.f.support_end(), hi.f.support_end());
  for (int j = 0; j <= grid; ++j) {
    const double r = end * j / grid;
    if (lo.f.value(r) > hi.f.value(r) + slack) fail("pointwise monotone in s");
  }
}

FamilyMember build_profile_family(FamilyKind kind, double s, double c, double ell) {
  if (!(c > 0.0)) fail("requires c > 0");
  if (kind == FamilyKind::nonzero_class && !(ell > 0.0))
    fail("nonzero-class family requires ell > 0");
  FamilyMember m{kind, s, c, ell, build_member_profile(kind, s, c)};
  verify_family_member(m);
  return m;
}

ProfileFunction cut_parabola(double height, double cut_start, double cut_end) {
  if (!(height > 0.0) || !(0.0 < cut_start && cut_start < cut_end && cut_end < 1.0))
    throw std::invalid_argument("cut_parabola: bad parameters");
  std::vector<Knot> knots;
  emit_parabola(knots, 0.0, cut_start, height);
  emit_parabola_release(knots, cut_start, cut_end, height, 0.0);
  knots.back() = {knots.back().r, 0.0, 0.0, 0.0};
  ProfileFunction f = ProfileFunction::from_knots(std::move(knots));
  for (int j = 0; j <= 1024; ++j) {
    const double r = f.support_end() * j / 1024.0;
    if (f.deriv(r) > 1e-12)
      throw std::invalid_argument("cut_parabola: release not monotone");
  }
  return f;
}

ProfileFunction sharpness_profile(double m, double delta) {
  if (!(m > 0.0) || !(delta > 0.0) || !(delta < m))
    fail("sharpness requires 0 < delta < m");
  // Slope profile -S T(r) with T a C1 quadratic trapezoid: rises on
  // [x0, x0+eta], plateau 1, falls on [x1-eta, x1]. Integral of T is
  // x1 - x0 - eta, fixing S; f' stays within (-m, 0] iff S < m.
  const double x0 = 0.004, x1 = 0.996, eta = 0.008;
  const double S = (m - delta) / (x1 - x0 - eta);
  if (!(S < m * (1.0 - 1e-9)))
    fail("slope budget: delta too small for |f'| < m");
  const double v = m - delta;
  std::vector<Knot> knots;
  knots.push_back({0.0, v, 0.0, 0.0});
  knots.push_back({x0, v, 0.0, 0.0});
  knots.push_back({x0 + 0.5 * eta, v - S * eta / 12.0, -0.5 * S, -2.0 * S / eta});
  knots.push_back({x0 + eta, v - 0.5 * S * eta, -S, 0.0});
  const double f_fall = v - S * (x1 - x0 - 1.5 * eta);
  knots.push_back({x1 - eta, f_fall, -S, 0.0});
  knots.push_back({x1 - 0.5 * eta, f_fall - S * 5.0 * eta / 12.0, -0.5 * S,
                   2.0 * S / eta});
  knots.push_back({x1, 0.0, 0.0, 0.0});
  ProfileFunction f = ProfileFunction::from_knots(std::move(knots));
  for (int j = 0; j <= 4096; ++j) {
    const double r = j / 4096.0;
    const Jet jet = f.eval(std::min(r, f.support_end()));
    if (r < 1.0 && !(jet.f < (1.0 - r) * m)) fail("stays under the chord (1-r) m");
    if (jet.fp > 1e-12) fail("nonpositive slope");
    if (!(jet.fp > -m)) fail("slope strictly above -m");
  }
  return f;
}

}  // namespace hamlab
