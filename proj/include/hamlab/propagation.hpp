#pragma once
// Discrete-time evolution of sequences of Hamiltonian time-1 maps, and the
// experiments built on them: propagation-speed estimates over seed grids,
// fixed points of perturbed compositions with prescribed integer
// displacement, Birkhoff averages and rotation-set estimates for
// skew-product driven sequences, and the damped system whose displacement
// stays uniformly bounded.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hamlab/field.hpp"
#include "hamlab/flow.hpp"
#include "hamlab/hull.hpp"
#include "hamlab/orbits.hpp"
#include "hamlab/phase.hpp"

namespace hamlab {

enum class SystemKind { constant, perturbed, skew_product, damped };

// Deterministic supply of perturbation generators: step index i yields a
// cosine bump with wave vector, phase and sign drawn from a counter RNG at
// (seed, i), scaled so the sampled oscillation stays strictly below `bound`.
struct PerturbationProvider {
  int dim = 1;
  double bound = 0.1;       // oscillation budget (strict upper bound)
  std::uint64_t seed = 1;
  HamiltonianField generator(int i) const;
};

// Base dynamics y -> y + alpha on the d-torus driving a y-dependent choice of
// Hamiltonian on the phase space. `field_of` must be deterministic: equal y
// must produce identical field parameters.
struct SkewProductSystem {
  int base_dim = 1;
  std::vector<double> alpha;  // declared rationally independent, size base_dim
  std::function<HamiltonianField(const std::vector<double>& y)> field_of;
  std::vector<double> y0;     // initial base point, size base_dim
};

// One-dimensional dissipative build: the time-1 map applies the momentum-only
// flow of profile(|p|) and then compresses momentum through u. The profile
// must be supported strictly inside |p| < 1/2; u must be an increasing map of
// [-1, 1] fixing everything with |s| >= 3/4 and strictly raising everything
// inside. gamma is max |profile'|, and escape_steps is the least N with
// u^N(-2/3) > 2/3; the displacement of every orbit is bounded by
// (escape_steps + 1) * gamma.
struct DampedSystem {
  DampedSystem(ProfileFunction profile_in, std::function<double(double)> u_in)
      : profile(std::move(profile_in)), u(std::move(u_in)) {}

  ProfileFunction profile;
  std::function<double(double)> u;
  double gamma = 0.0;      // filled by build_damped_system
  long escape_steps = 0;   // filled by build_damped_system
};

class SequentialSystem {
 public:
  static SequentialSystem constant(HamiltonianField H,
                                   const IntegrateOptions& opts = {});
  static SequentialSystem perturbed(HamiltonianField base,
                                    PerturbationProvider provider,
                                    const IntegrateOptions& opts = {});
  static SequentialSystem skew_product(SkewProductSystem sk,
                                       const IntegrateOptions& opts = {});

  SystemKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const IntegrateOptions& integrate_options() const { return opts_; }

  // Apply the i-th map of the sequence (i >= 1) to a lifted point.
  LiftedPoint step(int i, const LiftedPoint& x) const;

  // Generating fields of steps 1..k in application order (index 0 acts
  // first); perturbed systems interleave base and perturbation. Throws for
  // the damped kind, whose momentum compression is not a Hamiltonian flow.
  std::vector<HamiltonianField> factor_fields(int k) const;

  // Zero-section infimum of the base field (the constant c in the fixed-point
  // hypothesis); 0 for skew products.
  double zero_section_bound() const;
  // Perturbation oscillation budget a; exactly 0 for unperturbed kinds.
  double perturbation_bound() const;

  const HamiltonianField* base_field() const;
  const SkewProductSystem* skew() const { return skew_.get(); }
  const DampedSystem* damped() const { return damped_.get(); }

  friend SequentialSystem build_damped_system(DampedSystem spec);

 private:
  SequentialSystem() = default;
  SystemKind kind_ = SystemKind::constant;
  int dim_ = 0;
  std::shared_ptr<const HamiltonianField> base_;
  PerturbationProvider provider_;
  std::shared_ptr<const SkewProductSystem> skew_;
  std::shared_ptr<const DampedSystem> damped_;
  IntegrateOptions opts_;
  // Perturbation generators are audited once and reused across steps.
  struct FactorCache;
  std::shared_ptr<FactorCache> cache_;
};

// Validates the damped invariants (monotone u on a 4096 grid, boundary fixing,
// strict gain inside, profile support inside |p| < 1/2), computes gamma on an
// 8192 grid and escape_steps by iteration (capped at 1e6), and wraps the
// result as a damped-kind sequence of explicit maps.
SequentialSystem build_damped_system(DampedSystem spec);

// Discrete orbit x_j = f_j(x_{j-1}), recorded at integer times 0..k.
Trajectory evolve(const SequentialSystem& system, const LiftedPoint& x0, int k);

struct PropagationSpeedResult {
  std::vector<double> radius;         // r_j for j = 1..k
  std::vector<double> radius_over_k;  // r_j / j
  double speed_estimate = 0.0;        // r_k / k
  double grid_dispersion = 0.0;
};

// Largest ball about the origin covered by the cloud of q-displacements of
// the j-step evolution over the seed grid, for each j <= k. Coverage is
// directional: on a fan of unit directions (2 for n = 1, 64 for n = 2) every
// target r*dir must have a cloud point v with |v - r*dir| <= 0.05|v| +
// grid dispersion. The radius search scans 512 candidate levels of
// [0, max |v|] from above. Seeds with identical images (identity system)
// give exactly zero. Requires n <= 2.
PropagationSpeedResult propagation_speed(const SequentialSystem& system, int k,
                                         const std::vector<LiftedPoint>& grid);

struct FixedPointReport {
  bool hypothesis_met = false;   // |v| < k (c - a)
  double hypothesis_margin = 0;  // k (c - a) - |v|
  bool found = false;
  LiftedPoint x0;                 // = orbit.front()
  std::vector<LiftedPoint> orbit;  // converged chain, one point per factor
  double residual = 0.0;           // largest matching or closure defect
  int seeds_tried = 0;
  int newton_iters = 0;
};

struct FixedPointSearchOptions {
  int q_resolution = 9;
  int p_resolution = 33;
  double residual_tol = 1e-7;
  int max_seeds = 0;  // 0 = all seeds
  ShootOptions shoot;
};

// Search for a point x with f^(k)(x) = x + (v, 0) over a fundamental-domain
// seed grid, seeds ordered by how close the unperturbed k-step displacement
// at the seed comes to v. Each seed runs the multiple-shooting Newton, so the
// residual reported is the largest defect along the orbit chain rather than
// an end-to-end error that the composed derivative would amplify. The
// hypothesis |v| < k (c - a) is checked and reported; the search runs either
// way.
FixedPointReport find_displacement_fixed_point(const SequentialSystem& system,
                                               int k, const HomotopyClass& v,
                                               const FixedPointSearchOptions& opts = {});

// Time average of the per-step q-displacement along the skew-product orbit
// started at (x0, system.skew()->y0): (1/N) sum of the first N step
// displacements. For a constant momentum-only field this is exact for all N.
Vec birkhoff_average(const SequentialSystem& system, const LiftedPoint& x0, int N);

// Same average for a scalar observable of (phase point, base point).
double birkhoff_average_observable(
    const SequentialSystem& system, const LiftedPoint& x0, int N,
    const std::function<double(const LiftedPoint&, const std::vector<double>&)>& w);

struct RotationSetEstimate {
  std::vector<Vec> vectors;          // q_k / k per sample
  std::vector<Point2> hull;          // CCW vertices (n = 2) or interval ends (n = 1)
  double inscribed_radius = 0.0;     // largest ball about 0 inside the hull
  std::vector<Point2> extremal_points;  // = hull vertices
  std::vector<int> extremal_samples;    // samples within 1e-2 of a vertex
};

struct RotationSetOptions {
  int phase_resolution = 8;   // per-axis fundamental-domain resolution
  int base_resolution = 4;    // per-axis base-grid resolution
  double momentum_cap = 0.97;
  int max_samples = 0;        // 0 = no cap
};

// Rotation vectors q_k/k over a (phase grid) x (base grid) sample, their
// planar convex hull (interval for n = 1), and the inscribed-ball radius
// about the origin. Rejects phase dimension n > 2.
RotationSetEstimate rotation_set_estimate(const SequentialSystem& system, int k,
                                          const RotationSetOptions& opts = {});

struct DampedBoundReport {
  double max_displacement = 0.0;
  double bound = 0.0;  // (escape_steps + 1) * gamma
  bool holds = false;
};

// Max |q_i - q_0| over the seed grid and horizons i <= k against the uniform
// displacement bound of the damped build.
DampedBoundReport verify_damped_bound(const SequentialSystem& system,
                                      const std::vector<LiftedPoint>& grid, int k);

}  // namespace hamlab
