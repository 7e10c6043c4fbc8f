#pragma once
// Parametric families of profile functions used to probe the two kinds of
// periodic-orbit manifolds: one family squeezes the zero section (parabolic
// cap, so the p = 0 orbits stay nondegenerate), the other squeezes the
// nonzero-class orbit pairs (flat cap, curvature concentrated in two ramps).
// Members are indexed by a real parameter s: pointwise nondecreasing in s,
// head value f_s(0) = c + e^s decreasing to c as s -> -infinity and unbounded
// as s -> +infinity. Every builder verifies its shape clauses on a dense grid
// and throws FamilyClauseViolation naming the clause that failed; nothing is
// silently repaired.

#include <stdexcept>
#include <string>

#include "hamlab/profile.hpp"

namespace hamlab {

enum class FamilyKind {
  zero_section,   // parabolic cap; plateau below zero for s <= -1
  nonzero_class,  // flat cap; slope dips below -ell in a single ramp
};

struct FamilyMember {
  FamilyKind kind;
  double s;
  double c;
  double ell;  // only meaningful for nonzero_class
  ProfileFunction f;
};

struct FamilyClauseViolation : std::runtime_error {
  explicit FamilyClauseViolation(const std::string& clause)
      : std::runtime_error("profile family clause violated: " + clause) {}
};

// Construct and verify one member. `ell` is required (> 0) for nonzero_class
// and ignored for zero_section. Requires c > 0.
FamilyMember build_profile_family(FamilyKind kind, double s, double c,
                                  double ell = 0.0);

// Re-run the dense-grid clause checks on an existing member (used by tests).
void verify_family_member(const FamilyMember& m, int grid = 1024);

// Pointwise monotonicity in s: requires lo.f <= hi.f + slack on a dense grid.
void verify_family_monotone(const FamilyMember& lo, const FamilyMember& hi,
                            int grid = 1024, double slack = 1e-9);

// Radii in (0, support_end) where f' crosses the given level, located by a
// sign-change scan over `grid` intervals and bisection run to machine
// resolution (steep-ramp roots need that much to pin down nearby values).
std::vector<double> slope_level_crossings(const ProfileFunction& f, double level,
                                          int grid = 4096);

// f(r) = height (1 - r^2) released smoothly to 0 over [cut_start, cut_end].
// The workhorse test profile: strictly decreasing, f''(0) = -2 height.
ProfileFunction cut_parabola(double height, double cut_start = 0.9,
                             double cut_end = 0.97);

// Plateau of height m - delta near 0 dropping to 0 before r = 1 with
// |f'| < m everywhere and f(r) < (1 - r) m everywhere: certifies that the
// propagation bound cannot be improved at class norm m. Throws
// FamilyClauseViolation when delta is too small for the slope budget.
ProfileFunction sharpness_profile(double m, double delta);

}  // namespace hamlab
