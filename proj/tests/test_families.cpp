#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hamlab/families.hpp"

using namespace hamlab;

TEST_CASE("zero-section family: head value, cap curvature, verification") {
  for (double s : {-1.5, 0.0, 1.25}) {
    FamilyMember m = build_profile_family(FamilyKind::zero_section, s, 1.0);
    CHECK(m.f.value(0.0) == doctest::Approx(1.0 + std::exp(s)).epsilon(1e-12));
    CHECK(m.f.deriv(0.0) == 0.0);
    CHECK(m.f.deriv2(0.0) < 0.0);  // nondegenerate cap at p = 0
    CHECK_NOTHROW(verify_family_member(m));
  }
}

TEST_CASE("zero-section family is pointwise monotone in s") {
  FamilyMember lo = build_profile_family(FamilyKind::zero_section, -0.75, 1.3);
  FamilyMember hi = build_profile_family(FamilyKind::zero_section, 0.5, 1.3);
  CHECK_NOTHROW(verify_family_monotone(lo, hi));
  // reversed order is a caller error, not a family property
  CHECK_THROWS(verify_family_monotone(hi, lo));
}

TEST_CASE("nonzero-class family: crossing pair, actions, curvature signs") {
  const double ell = 1.0;
  for (double s : {-0.5, 0.75}) {
    FamilyMember m = build_profile_family(FamilyKind::nonzero_class, s, 0.8, ell);
    CHECK_NOTHROW(verify_family_member(m));
    auto down = slope_level_crossings(m.f, -ell);
    REQUIRE(down.size() == 2);
    double r1 = down[0], r2 = down[1];
    CHECK(r1 < r2);
    // inner orbit concave (max of the action pair), outer convex
    CHECK(m.f.deriv2(r1) < 0.0);
    CHECK(m.f.deriv2(r2) > 0.0);
    double a1 = m.f.value(r1) + r1 * ell;
    double a2 = m.f.value(r2) + r2 * ell;
    CHECK(a1 > a2);
    CHECK(a2 < ell + 1e-9);  // outer action pinned below the class slope
    // any positive-slope crossings must carry negative values
    for (double r : slope_level_crossings(m.f, +ell))
      CHECK(m.f.value(r) < 0.0);
  }
}

TEST_CASE("nonzero-class family is pointwise monotone in s") {
  FamilyMember lo = build_profile_family(FamilyKind::nonzero_class, -1.0, 0.8, 1.0);
  FamilyMember hi = build_profile_family(FamilyKind::nonzero_class, 0.0, 0.8, 1.0);
  CHECK_NOTHROW(verify_family_monotone(lo, hi));
}

TEST_CASE("family builders validate their arguments") {
  CHECK_THROWS(build_profile_family(FamilyKind::zero_section, 0.0, 0.0));
  CHECK_THROWS(build_profile_family(FamilyKind::zero_section, 0.0, -1.0));
  CHECK_THROWS(build_profile_family(FamilyKind::nonzero_class, 0.0, 1.0, 0.0));
  CHECK_THROWS(build_profile_family(FamilyKind::nonzero_class, 0.0, 1.0, -2.0));
}

TEST_CASE("tampered members fail re-verification") {
  FamilyMember m = build_profile_family(FamilyKind::zero_section, 0.0, 1.0);
  m.c += 0.5;  // declared head value no longer matches the profile
  CHECK_THROWS_AS(verify_family_member(m), FamilyClauseViolation);

  FamilyMember t = build_profile_family(FamilyKind::nonzero_class, 0.0, 0.8, 1.0);
  t.s -= 0.4;  // cap level was built for the original parameter
  CHECK_THROWS_AS(verify_family_member(t), FamilyClauseViolation);
}

TEST_CASE("slope crossings: exact root on the cut parabola") {
  // f = 2 (1 - r^2) before the cut, so f' = -4 r and the level -1 root sits
  // exactly at r = 1/4; bisection to machine resolution must nail it
  ProfileFunction f = cut_parabola(2.0, 0.9, 0.97);
  auto down = slope_level_crossings(f, -1.0);
  REQUIRE(down.size() >= 1);
  CHECK(std::fabs(down[0] - 0.25) <= 1e-12);
  // every reported root carries a slope value at the level, even on the
  // steep release ramp where fixed-width bisection used to leave O(1) errors
  for (double level : {-1.0, -2.0, -5.0}) {
    for (double r : slope_level_crossings(f, level)) {
      CHECK(r > 0.0);
      CHECK(r < 1.0);
      CHECK(f.deriv(r) == doctest::Approx(level).epsilon(1e-9));
    }
  }
  // the profile is nonincreasing, so positive levels never cross
  CHECK(slope_level_crossings(f, 1.0).empty());
  CHECK(slope_level_crossings(f, 0.5).empty());
}

TEST_CASE("slope crossings are sorted and distinct") {
  ProfileFunction f = cut_parabola(2.0);
  auto roots = slope_level_crossings(f, -2.0);
  for (std::size_t i = 1; i < roots.size(); ++i)
    CHECK(roots[i] > roots[i - 1]);
}

TEST_CASE("sharpness profile: plateau height and strict slope budget") {
  ProfileFunction f = sharpness_profile(1.0, 0.1);
  CHECK(f.value(0.0) == doctest::Approx(0.9).epsilon(1e-12));
  // |f'| < m everywhere, so the unit class has no orbit radii at all
  CHECK(slope_level_crossings(f, -1.0).empty());
  CHECK(slope_level_crossings(f, 1.0).empty());
  double max_slope = 0.0;
  for (int j = 0; j <= 4096; ++j) {
    double r = 0.999 * j / 4096.0;
    max_slope = std::max(max_slope, std::fabs(f.deriv(r)));
    // stays under the chord (1 - r) m, the certificate that the propagation
    // bound is tight at this class norm
    CHECK(f.value(r) < (1.0 - r) * 1.0);
  }
  CHECK(max_slope < 1.0);
}

TEST_CASE("sharpness profile rejects an infeasible slope budget") {
  // delta so small the mean slope alone would exceed m
  CHECK_THROWS_AS(sharpness_profile(1.0, 0.01), FamilyClauseViolation);
  CHECK_THROWS(sharpness_profile(1.0, 1.5));  // delta >= m
  CHECK_THROWS(sharpness_profile(-1.0, 0.1));
}
