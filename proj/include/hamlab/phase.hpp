#pragma once
// Phase-space geometry for dynamics on the n-torus with open unit momentum
// disc. Points live either on the universal cover (q unconstrained) or on the
// base (q reduced mod 1 into [0,1)^n). All operations are pure; nothing here
// mutates its inputs.

#include <cstdint>
#include <vector>

#include "hamlab/vec.hpp"

namespace hamlab {

// Point on the cover: q in R^n, p in the open unit disc.
struct LiftedPoint {
  Vec q;
  Vec p;

  int dim() const { return static_cast<int>(q.size()); }
  Vec flat() const;                          // (q_1..q_n, p_1..p_n)
  static LiftedPoint from_flat(const Vec& x);
};

// Point on the base: q reduced into [0,1)^n.
struct BasePoint {
  Vec q;
  Vec p;
};

// Integer lattice class of a loop (the deck translation its lift picks up).
struct HomotopyClass {
  std::vector<std::int64_t> e;

  int dim() const { return static_cast<int>(e.size()); }
  // Euclidean length computed from the exact integer sum of squares, so e.g.
  // (3,4) has norm exactly 5.
  double norm() const;
  bool is_zero() const;
};

// Centered fundamental cell: max_i |q_i| <= 1/2 and |p| < 1.
struct FundamentalDomain {
  int n = 1;
  bool contains(const LiftedPoint& x) const;
};

// Reduce q mod 1 into [0,1)^n; exact integers map to 0. p is unchanged.
BasePoint project(const LiftedPoint& x);

// Translate q by the integer vector e; p is unchanged.
LiftedPoint deck_transform(const LiftedPoint& x, const HomotopyClass& e);

// Tensor grid over the fundamental cell: per-axis `resolution` points, q axes
// spanning [-1/2, 1/2] and p axes spanning [-cap, cap] (a single point sits at
// the axis center), keeping only points with |p| <= cap. Requires
// resolution >= 1 and 0 < cap < 1.
std::vector<LiftedPoint> sample_fundamental_domain(int n, int resolution,
                                                   double momentum_cap);

}  // namespace hamlab
