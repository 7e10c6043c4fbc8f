#include "hamlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hamlab {

namespace {

int step_count(double span, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("integrate: dt must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::fabs(span) / dt)));
}

// One implicit midpoint step of size dt from (t, x); x has 2 n entries.
void midpoint_step(const HamiltonianField& H, double t, double dt, int step_index,
                   Vec& x, Vec& mid, Vec& rhs, const IntegrateOptions& opts) {
  const int m = static_cast<int>(x.size());
  const double tm = t + 0.5 * dt;
  mid = x;
  double delta = 0.0;
  for (int it = 0; it < opts.max_fp_iters; ++it) {
    H.rhs(tm, mid.data(), rhs.data());
    delta = 0.0;
    for (int i = 0; i < m; ++i) {
      const double want = x[i] + 0.5 * dt * rhs[i];
      delta = std::max(delta, std::fabs(want - mid[i]));
      mid[i] = want;
    }
    if (delta <= opts.fp_tol) break;
  }
  if (delta > opts.fp_tol)
    throw std::runtime_error("integrate: midpoint fixed point stalled at step " +
                             std::to_string(step_index));
  for (int i = 0; i < m; ++i) x[i] = 2.0 * mid[i] - x[i];
  const int n = m / 2;
  double pp = 0.0;
  for (int i = n; i < m; ++i) pp += x[i] * x[i];
  if (pp >= 1.0) throw EscapeError(step_index);
}

}  // namespace

LiftedPoint integrate(const HamiltonianField& H, const LiftedPoint& x0, double t0,
                      double t1, const IntegrateOptions& opts) {
  if (x0.dim() != H.dim()) throw std::invalid_argument("integrate: dim mismatch");
  if (t0 == t1) return x0;
  if (H.momentum_only() && !opts.force_stepping) {
    LiftedPoint out = x0;
    const Vec gp = H.grad_p(0.0, x0.q, x0.p);
    for (int i = 0; i < H.dim(); ++i) out.q[i] += (t1 - t0) * gp[i];
    return out;
  }
  const int steps = step_count(t1 - t0, opts.dt);
  const double dt = (t1 - t0) / steps;
  Vec x = x0.flat(), mid(x.size()), rhs(x.size());
  for (int k = 0; k < steps; ++k)
    midpoint_step(H, t0 + k * dt, dt, k, x, mid, rhs, opts);
  return LiftedPoint::from_flat(x);
}

Trajectory integrate_trajectory(const HamiltonianField& H, const LiftedPoint& x0,
                                double t0, double t1,
                                const IntegrateOptions& opts) {
  if (x0.dim() != H.dim())
    throw std::invalid_argument("integrate_trajectory: dim mismatch");
  Trajectory traj;
  traj.n = H.dim();
  if (t0 == t1) {
    traj.times = {t0};
    traj.states = {x0.flat()};
    return traj;
  }
  const int steps = step_count(t1 - t0, opts.dt);
  const double dt = (t1 - t0) / steps;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  Vec x = x0.flat(), mid(x.size()), rhs(x.size());
  traj.times.push_back(t0);
  traj.states.push_back(x);
  const bool exact = H.momentum_only() && !opts.force_stepping;
  Vec gp;
  if (exact) gp = H.grad_p(0.0, x0.q, x0.p);
  for (int k = 0; k < steps; ++k) {
    if (exact) {
      for (int i = 0; i < traj.n; ++i) x[i] += dt * gp[i];
    } else {
      midpoint_step(H, t0 + k * dt, dt, k, x, mid, rhs, opts);
    }
    traj.times.push_back(k + 1 == steps ? t1 : t0 + (k + 1) * dt);
    traj.states.push_back(x);
  }
  return traj;
}

LiftedPoint time_one_map(const HamiltonianField& H, const LiftedPoint& x0,
                         const IntegrateOptions& opts) {
  return integrate(H, x0, 0.0, 1.0, opts);
}

double action_along(const HamiltonianField& H, const Trajectory& traj) {
  const int n = traj.n;
  const std::size_t m = traj.states.size();
  if (m < 2) return 0.0;
  Vec gp(n);
  Vec integrand(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double* q = traj.states[k].data();
    const double* p = q + n;
    const double t = traj.times[k];
    H.grad_p(t, q, p, gp.data());
    double pdq = 0.0;
    for (int i = 0; i < n; ++i) pdq += p[i] * gp[i];
    integrand[k] = H.value(t, q, p) - pdq;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k)
    acc += 0.5 * (integrand[k] + integrand[k + 1]) * (traj.times[k + 1] - traj.times[k]);
  return acc;
}

double action_along(const HamiltonianField& H, const Trajectory& traj,
                    const HomotopyClass& e) {
  const int n = traj.n;
  double gap = 0.0;
  for (int i = 0; i < n; ++i) {
    gap = std::max(gap, std::fabs(traj.back()[i] - traj.front()[i] -
                                  static_cast<double>(e.e[i])));
    gap = std::max(gap, std::fabs(traj.back()[n + i] - traj.front()[n + i]));
  }
  if (gap > 1e-6)
    throw std::runtime_error("action_along: trajectory does not close up to the "
                             "requested deck translation (gap " +
                             std::to_string(gap) + ")");
  return action_along(H, traj);
}

Vec displacement(const Trajectory& traj) {
  Vec d(traj.n);
  for (int i = 0; i < traj.n; ++i)
    d[i] = traj.states.back()[i] - traj.states.front()[i];
  return d;
}

Eigen::MatrixXd flow_jacobian(const HamiltonianField& H, const LiftedPoint& x0,
                              double t0, double t1, const IntegrateOptions& opts,
                              double fd_step) {
  const int n = H.dim();
  const int m = 2 * n;
  Eigen::MatrixXd J(m, m);
  Vec base = x0.flat();
  for (int j = 0; j < m; ++j) {
    Vec hi = base, lo = base;
    hi[j] += fd_step;
    lo[j] -= fd_step;
    const Vec fhi = integrate(H, LiftedPoint::from_flat(hi), t0, t1, opts).flat();
    const Vec flo = integrate(H, LiftedPoint::from_flat(lo), t0, t1, opts).flat();
    for (int i = 0; i < m; ++i) J(i, j) = (fhi[i] - flo[i]) / (2.0 * fd_step);
  }
  return J;
}

double symplectic_defect(const Eigen::MatrixXd& M) {
  const int m = static_cast<int>(M.rows());
  const int n = m / 2;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < n; ++i) {
    omega(i, n + i) = 1.0;
    omega(n + i, i) = -1.0;
  }
  return (M.transpose() * omega * M - omega).cwiseAbs().maxCoeff();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (int i = 1; i <= traj.n; ++i) os << ",q" << i;
  for (int i = 1; i <= traj.n; ++i) os << ",p" << i;
  os << "\n";
  char buf[32];
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
    os << buf;
    for (double v : traj.states[k]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << "\n";
  }
}

}  // namespace hamlab
