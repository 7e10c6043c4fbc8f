#pragma once
// Periodic orbit machinery. Orbits of the time-1 map in a fixed translation
// class e solve F(x) = x + (e, 0) on the cover. Momentum-only profile fields
// admit a closed-form enumeration (roots of f'(r) = -+|e| on the radial
// axis); everything else goes through damped Newton shooting with a
// pseudoinverse linear solve, which tolerates the rank drop along torus
// families of orbits and also handles composed sequences of time-1 maps.

#include <vector>

#include <Eigen/Dense>

#include "hamlab/field.hpp"
#include "hamlab/flow.hpp"
#include "hamlab/phase.hpp"

namespace hamlab {

// One radial orbit family of H = f(|p|): momentum sign * r * e/|e|, a torus
// worth of starting positions, action f(r) - r f'(r) evaluated on the spline.
struct ProfileOrbitDatum {
  double radius = 0.0;
  int sign = 0;              // f'(radius) = sign * ell
  double action = 0.0;
  bool nondegenerate = false;  // f''(radius) != 0
  int manifold_dim = 0;        // dimension of the orbit family (n, set by callers)
};

// All roots of f'(r) = -ell and f'(r) = +ell on (0, 1), located by a
// sign-change scan on `scan` subintervals plus bisection. Requires ell > 0;
// an empty result is valid (no orbits in classes of that length).
std::vector<ProfileOrbitDatum> enumerate_profile_orbits(const ProfileFunction& f,
                                                        double ell,
                                                        int scan = 4096);

struct PeriodicOrbit {
  HomotopyClass e;
  LiftedPoint x0;
  Trajectory trajectory;   // over [0, 1] at the shooting step size
  double action = 0.0;
  double residual = 0.0;   // |F(x0) - x0 - (e, 0)|_inf
  int kernel_dim = 0;      // dim ker(DF - I) at x0
};

enum class ShootStatus {
  converged,
  non_convergence,  // residual stayed above tolerance or the line search stalled
};

struct ShootOptions {
  IntegrateOptions integ;
  double residual_tol = 1e-8;
  int max_iters = 50;
  double fd_step = 1e-6;      // map Jacobian differences
  double svd_cutoff = 1e-8;   // relative; smaller singular values are dropped
  double cond_limit = 1e12;   // beyond this the Jacobian is flagged singular
};

struct OrbitSearchResult {
  ShootStatus status = ShootStatus::non_convergence;
  PeriodicOrbit orbit;        // fully populated only when converged
  double residual = 0.0;
  int iters = 0;
  // Condition number exceeded cond_limit at some iteration. Expected for
  // torus families of orbits; the pseudoinverse step still converges onto
  // the family, so this is a report, not a failure.
  bool jacobian_singular = false;
};

// Damped Newton on G(x) = F(x) - x - (e, 0) where F is H's time-1 map. A
// converged result carries the sampled trajectory, its action, the recomputed
// residual, and the monodromy kernel dimension.
OrbitSearchResult find_orbit(const HamiltonianField& H, const HomotopyClass& e,
                             const LiftedPoint& guess,
                             const ShootOptions& opts = {});

// Shooting seeds: momentum-only fields get q = 0, p = r e/|e| for r on a
// radial grid (plus p = 0 when e = 0); general fields get the fundamental
// domain sample.
std::vector<LiftedPoint> default_orbit_seeds(const HamiltonianField& H,
                                             const HomotopyClass& e,
                                             int radial = 64);

struct MorseBottReport {
  bool is_morse_bott = false;
  int kernel_dim = 0;
};

// kernel_dim counts singular values of (DF - I) below `tol` at the orbit
// start; Morse-Bott means it equals the expected family dimension.
MorseBottReport morse_bott_rank(const HamiltonianField& H,
                                const PeriodicOrbit& orbit, int expected_dim,
                                const IntegrateOptions& integ = {},
                                double tol = 1e-4);

struct SpectrumResult {
  std::vector<double> actions;  // ascending, deduplicated within 1e-6
  int converged_seeds = 0;
  int skipped_seeds = 0;
};

// Best-effort action spectrum: find_orbit from every seed, deduplicate by
// (|p(0)| to 1e-5, action to 1e-6). Completeness is not guaranteed; acceptance
// uses profile fields where the enumeration provides the oracle.
SpectrumResult action_spectrum(const HamiltonianField& H, const HomotopyClass& e,
                               const std::vector<LiftedPoint>& seeds,
                               const ShootOptions& opts = {});

struct OrbitExistenceReport {
  bool hypothesis_met = false;  // |e| <= zero-section infimum
  bool found = false;
  bool certified = false;       // found and action >= infimum - 1e-4
  double floor_value = 0.0;     // the zero-section infimum c
  PeriodicOrbit orbit;          // valid when found
};

// Search the seed grid for a class-e orbit whose action clears the
// zero-section floor. Not finding one is a report (the search is incomplete),
// never an exception.
OrbitExistenceReport verify_orbit_existence(const HamiltonianField& H,
                                            const HomotopyClass& e,
                                            const std::vector<LiftedPoint>& seeds,
                                            const ShootOptions& opts = {});

// Sequential composition of time-1 maps: factors[0] acts first.
LiftedPoint apply_factors(const std::vector<HamiltonianField>& factors,
                          const LiftedPoint& x0,
                          const IntegrateOptions& opts = {});

// Sum of the per-factor action integrals along the concatenated trajectory.
double factors_action(const std::vector<HamiltonianField>& factors,
                      const LiftedPoint& x0, const IntegrateOptions& opts = {});

// Jacobian of the composed map by central differences.
Eigen::MatrixXd factors_jacobian(const std::vector<HamiltonianField>& factors,
                                 const LiftedPoint& x0,
                                 const IntegrateOptions& opts = {},
                                 double fd_step = 1e-6);

struct ComposedFixResult {
  ShootStatus status = ShootStatus::non_convergence;
  LiftedPoint x0;
  double residual = 0.0;
  int iters = 0;
  bool jacobian_singular = false;
};

// Damped Newton on G(x) = F(x) - x - (v, 0) for the composed map; v is a
// plain translation vector, not required to be integral.
ComposedFixResult find_composed_fixed_point(
    const std::vector<HamiltonianField>& factors, const Vec& v,
    const LiftedPoint& guess, const ShootOptions& opts = {});

struct ChainFixResult {
  ShootStatus status = ShootStatus::non_convergence;
  std::vector<LiftedPoint> chain;  // one point per factor; chain[0] starts the orbit
  double residual = 0.0;           // largest matching or closure defect
  int iters = 0;
};

// Multiple-shooting version of the search above: one unknown point per factor,
// matching constraints between consecutive factors, and closure through the
// translation (v, 0) at the wrap. The end-to-end derivative of a long factor
// composition routinely has entries ~1e8 which shrinks the single-shoot Newton
// basin to nothing; the block banded system here keeps every block mild, so
// seeds far from the orbit still converge. Escapes from the momentum disc
// during evaluation propagate as EscapeError.
ChainFixResult find_composed_fixed_point_chain(
    const std::vector<HamiltonianField>& factors, const Vec& v,
    const LiftedPoint& guess, const ShootOptions& opts = {});

// Dimension of ker(DF - I) at x0 for H's time-1 map; singular values below
// `tol` count as zero.
int monodromy_kernel_dim(const HamiltonianField& H, const LiftedPoint& x0,
                         const IntegrateOptions& opts = {}, double tol = 1e-4);

// Sorted values with entries closer than `tol` merged to their first
// representative.
std::vector<double> dedupe_sorted(std::vector<double> values, double tol = 1e-9);

}  // namespace hamlab
