#pragma once
// Radial profile functions f(r) on [0,1): C2, f'(0) = 0 (so f(|p|) is C2 at
// p = 0), identically 0 from some r < 1 on. Stored as per-knot (r, f, f', f'')
// states with the unique quintic Hermite interpolant between knots; that makes
// the knot table a lossless serialization and lets piecewise-polynomial shapes
// of degree <= 5 be represented exactly.

#include <cstdint>
#include <string>
#include <vector>

namespace hamlab {

struct Knot {
  double r;
  double f;
  double fp;
  double fpp;
};

struct Jet {
  double f;
  double fp;
  double fpp;
};

class ProfileFunction {
 public:
  // Validates: >= 2 knots, strictly increasing r, first knot at r = 0 with
  // f' = 0, last knot strictly inside [0,1) with zero (f, f', f'') state.
  static ProfileFunction from_knots(std::vector<Knot> knots);

  // Evaluation requires r >= 0; at and beyond support_end it returns exact
  // zeros.
  Jet eval(double r) const;
  double value(double r) const { return eval(r).f; }
  double deriv(double r) const { return eval(r).fp; }
  double deriv2(double r) const { return eval(r).fpp; }

  // Batched evaluation through the kernel layer (bit-identical to eval).
  // Output pointers may be null to skip that component.
  void eval_many(const double* r, std::size_t n, double* f, double* fp,
                 double* fpp) const;

  double support_end() const { return knots_.back().r; }
  const std::vector<Knot>& knots() const { return knots_; }

  // Versioned text format: header line "profile-v1 <knot_count>", then one
  // "r,f,fp,fpp" line per knot at full precision. Round-trips exactly.
  std::string serialize() const;
  static ProfileFunction deserialize(const std::string& text);

 private:
  ProfileFunction() = default;
  std::vector<Knot> knots_;
  std::vector<double> coeff_;  // 6 monomial coefficients per piece, local u;
                               // one trailing all-zero piece for r beyond support
  std::int32_t piece_index(double r) const;
};

// Canonical C2 cubic ramp: R(0) = 0, R(1) = 1, R' = R'' = 0 at both ends,
// R' is a single bell with maximum 9/4 at t = 1/2, R'' changes sign exactly
// once (at t = 1/2). Built from the integral of the quadratic B-spline bell;
// polynomial pieces break at t = 1/3 and 2/3.
Jet ramp_jet(double t);
double ramp(double t);

// Segment emitters. Each appends the knot states of one analytic segment on
// [a, b] to `knots`, skipping the shared left knot when the list is nonempty
// (the previous segment's end state is reused, which is what makes the
// assembled spline exactly C2). Shapes of degree <= 5 are captured exactly.
void emit_constant(std::vector<Knot>& knots, double a, double b, double v);
// f(r) = K (1 - r^2)
void emit_parabola(std::vector<Knot>& knots, double a, double b, double K);
// f(r) = v0 + (v1 - v0) R((r-a)/(b-a))
void emit_step(std::vector<Knot>& knots, double a, double b, double v0, double v1);
// f(r) = L + (K (1 - r^2) - L) (1 - R((r-a)/(b-a))): releases the parabola cap
// K (1 - r^2) onto the plateau L, matching the cap's jet at a and the plateau
// jet at b; monotone decreasing whenever K (1 - r^2) > L on [a, b].
void emit_parabola_release(std::vector<Knot>& knots, double a, double b, double K,
                           double L);

}  // namespace hamlab
