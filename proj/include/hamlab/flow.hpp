#pragma once
// Time stepping for Hamiltonian fields. The integrator is implicit midpoint
// with a fixed-point inner solve on a uniform grid: it is symplectic, time
// reversible, and reproduces the exact translation flow of momentum-only
// fields (momentum is conserved step by step, so the q update is exact).
// States live on the universal cover; callers project when they need the
// torus.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamlab/field.hpp"
#include "hamlab/phase.hpp"
#include "hamlab/vec.hpp"

namespace hamlab {

// Thrown when a trajectory reaches |p| >= 1. The chart only covers the open
// unit momentum disc, so the flow is undefined past this point; searches that
// probe many seeds catch this to discard the offending seed.
struct EscapeError : std::runtime_error {
  int step;
  explicit EscapeError(int step_index)
      : std::runtime_error("integrate: momentum left the open unit disc at step " +
                           std::to_string(step_index)),
        step(step_index) {}
};

struct IntegrateOptions {
  double dt = 1e-3;       // requested step; actual step is span / ceil(span / dt)
  double fp_tol = 1e-12;  // fixed-point stop threshold (max component change)
  int max_fp_iters = 50;
  // Momentum-only fields are advanced by their closed-form translation unless
  // this forces the stepper (used by tests comparing the two).
  bool force_stepping = false;
};

struct Trajectory {
  int n = 0;                     // configuration dimension
  std::vector<double> times;     // node times, size steps + 1
  std::vector<Vec> states;       // flat (q, p) per node, each of size 2 n

  const Vec& front() const { return states.front(); }
  const Vec& back() const { return states.back(); }
};

// Advance x0 from t0 to t1 (either direction) and return the final state.
LiftedPoint integrate(const HamiltonianField& H, const LiftedPoint& x0, double t0,
                      double t1, const IntegrateOptions& opts = {});

// Same, recording every grid node. Momentum-only fields still honor the node
// grid so downstream quadrature sees uniform spacing.
Trajectory integrate_trajectory(const HamiltonianField& H, const LiftedPoint& x0,
                                double t0, double t1,
                                const IntegrateOptions& opts = {});

// Time-1 map of H starting at t = 0.
LiftedPoint time_one_map(const HamiltonianField& H, const LiftedPoint& x0,
                         const IntegrateOptions& opts = {});

// Trapezoid quadrature of (H - p . dq/dt) along the recorded nodes, with
// dq/dt read from the field as dH/dp. For a momentum-only profile f on a
// circular orbit of radius r this reproduces f(r) - r f'(r).
double action_along(const HamiltonianField& H, const Trajectory& traj);

// Same quadrature after verifying the trajectory closes up to the deck
// translation e (q shift by e, p unchanged) within 1e-6; throws with the
// measured gap otherwise.
double action_along(const HamiltonianField& H, const Trajectory& traj,
                    const HomotopyClass& e);

// q(T) - q(0) on the cover.
Vec displacement(const Trajectory& traj);

// Jacobian of the time (t0 -> t1) flow map at x0, by central differences of
// the integrator (step per coordinate). Rows and columns are ordered
// (q_1..q_n, p_1..p_n).
Eigen::MatrixXd flow_jacobian(const HamiltonianField& H, const LiftedPoint& x0,
                              double t0, double t1,
                              const IntegrateOptions& opts = {},
                              double fd_step = 1e-6);

// Largest entry of M^T Omega M - Omega, zero exactly when M is symplectic.
double symplectic_defect(const Eigen::MatrixXd& M);

// CSV with header t,q0..,p0.. and %.17g fields, one row per node.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace hamlab
