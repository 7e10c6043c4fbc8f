#include "hamlab/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace hamlab {

namespace {

// Bisect f'(r) - level on [a, b] given a sign change.
double bisect_slope(const ProfileFunction& f, double level, double a, double b) {
  double fa = f.deriv(a) - level;
  for (int it = 0; it < 100 && (b - a) > 1e-14; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f.deriv(m) - level;
    if (fm == 0.0) return m;
    if ((fa < 0.0) != (fm < 0.0)) {
      b = m;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> slope_roots(const ProfileFunction& f, double level, int scan) {
  std::vector<double> roots;
  const double end = f.support_end();
  double prev_r = 0.0, prev_v = f.deriv(0.0) - level;
  if (prev_v == 0.0) roots.push_back(0.0);
  for (int k = 1; k <= scan; ++k) {
    const double r = end * k / scan;
    const double v = f.deriv(r) - level;
    if (v == 0.0) {
      roots.push_back(r);
    } else if ((prev_v < 0.0) != (v < 0.0) && prev_v != 0.0) {
      roots.push_back(bisect_slope(f, level, prev_r, r));
    }
    prev_r = r;
    prev_v = v;
  }
  return roots;
}

Vec translation_target(const HomotopyClass& e) {
  Vec v(e.e.size());
  for (std::size_t i = 0; i < e.e.size(); ++i)
    v[i] = static_cast<double>(e.e[i]);
  return v;
}

double residual_inf(const Vec& image, const Vec& base, const Vec& v) {
  const int n = static_cast<int>(v.size());
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    r = std::max(r, std::fabs(image[i] - base[i] - v[i]));
  for (int i = n; i < 2 * n; ++i)
    r = std::max(r, std::fabs(image[i] - base[i]));
  return r;
}

struct NewtonOutcome {
  ShootStatus status = ShootStatus::non_convergence;
  Vec x;
  double residual = 0.0;
  int iters = 0;
  bool jacobian_singular = false;
};

// Shared damped Newton driver over an arbitrary map evaluation.
template <class MapFn, class JacFn>
NewtonOutcome newton_drive(MapFn map, JacFn jac, const Vec& v,
                           const LiftedPoint& guess, const ShootOptions& opts) {
  const int n = guess.dim();
  const int m = 2 * n;
  NewtonOutcome out;
  Vec x = guess.flat();
  Vec fx = map(x);
  double rnorm = residual_inf(fx, x, v);
  for (int it = 0; it < opts.max_iters; ++it) {
    out.iters = it;
    if (rnorm <= opts.residual_tol) {
      out.status = ShootStatus::converged;
      break;
    }
    Eigen::MatrixXd J = jac(x) - Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd g(m);
    for (int i = 0; i < n; ++i) {
      g(i) = fx[i] - x[i] - v[i];
      g(n + i) = fx[n + i] - x[n + i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(m - 1);
    if (smax > opts.cond_limit * std::max(smin, 1e-300))
      out.jacobian_singular = true;
    svd.setThreshold(opts.svd_cutoff / std::max(1.0, smax));
    const Eigen::VectorXd step = svd.solve(-g);
    // Backtracking: halve until the residual improves.
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 8; ++bt, lambda *= 0.5) {
      Vec trial(m);
      for (int i = 0; i < m; ++i) trial[i] = x[i] + lambda * step(i);
      Vec ftrial = map(trial);
      const double rtrial = residual_inf(ftrial, trial, v);
      if (rtrial < rnorm) {
        x = std::move(trial);
        fx = std::move(ftrial);
        rnorm = rtrial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stalled
  }
  if (rnorm <= opts.residual_tol) out.status = ShootStatus::converged;
  out.residual = rnorm;
  out.x = std::move(x);
  return out;
}

}  // namespace

std::vector<ProfileOrbitDatum> enumerate_profile_orbits(const ProfileFunction& f,
                                                        double ell, int scan) {
  if (!(ell > 0.0))
    throw std::invalid_argument("enumerate_profile_orbits: ell must be positive");
  std::vector<ProfileOrbitDatum> out;
  for (int sign : {-1, +1}) {
    for (double r : slope_roots(f, sign * ell, scan)) {
      if (r <= 1e-12 || r >= 1.0) continue;  // p = 0 carries no nonzero class
      ProfileOrbitDatum d;
      d.radius = r;
      d.sign = sign;
      d.action = f.value(r) - r * f.deriv(r);
      d.nondegenerate = std::fabs(f.deriv2(r)) > 1e-9;
      out.push_back(d);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ProfileOrbitDatum& a, const ProfileOrbitDatum& b) {
              return a.radius < b.radius;
            });
  return out;
}

OrbitSearchResult find_orbit(const HamiltonianField& H, const HomotopyClass& e,
                             const LiftedPoint& guess, const ShootOptions& opts) {
  if (e.dim() != H.dim())
    throw std::invalid_argument("find_orbit: class dim mismatch");
  const Vec v = translation_target(e);
  auto map = [&](const Vec& x) {
    return integrate(H, LiftedPoint::from_flat(x), 0.0, 1.0, opts.integ).flat();
  };
  auto jac = [&](const Vec& x) {
    return flow_jacobian(H, LiftedPoint::from_flat(x), 0.0, 1.0, opts.integ,
                         opts.fd_step);
  };
  NewtonOutcome nw = newton_drive(map, jac, v, guess, opts);
  OrbitSearchResult res;
  res.status = nw.status;
  res.residual = nw.residual;
  res.iters = nw.iters;
  res.jacobian_singular = nw.jacobian_singular;
  if (nw.status == ShootStatus::converged) {
    PeriodicOrbit& orb = res.orbit;
    orb.e = e;
    orb.x0 = LiftedPoint::from_flat(nw.x);
    orb.trajectory = integrate_trajectory(H, orb.x0, 0.0, 1.0, opts.integ);
    orb.residual = residual_inf(orb.trajectory.back(), nw.x, v);
    orb.action = action_along(H, orb.trajectory);
    orb.kernel_dim = monodromy_kernel_dim(H, orb.x0, opts.integ);
  }
  return res;
}

std::vector<LiftedPoint> default_orbit_seeds(const HamiltonianField& H,
                                             const HomotopyClass& e, int radial) {
  const int n = H.dim();
  std::vector<LiftedPoint> seeds;
  if (H.momentum_only()) {
    Vec dir(n, 0.0);
    if (e.is_zero()) {
      dir[0] = 1.0;
      LiftedPoint origin;
      origin.q.assign(n, 0.0);
      origin.p.assign(n, 0.0);
      seeds.push_back(origin);
    } else {
      const double inv = 1.0 / e.norm();
      for (int i = 0; i < n; ++i) dir[i] = static_cast<double>(e.e[i]) * inv;
    }
    const double rmax = std::min(0.999, std::max(H.support_radius(), 0.1));
    for (int k = 1; k <= radial; ++k) {
      const double r = rmax * k / (radial + 1);
      LiftedPoint s;
      s.q.assign(n, 0.0);
      s.p.resize(n);
      for (int i = 0; i < n; ++i) s.p[i] = r * dir[i];
      seeds.push_back(std::move(s));
    }
    return seeds;
  }
  const int res = std::max(2, static_cast<int>(std::lround(
                                  std::pow(double(radial), 1.0 / (2 * n)))));
  return sample_fundamental_domain(n, res, 0.95);
}

MorseBottReport morse_bott_rank(const HamiltonianField& H,
                                const PeriodicOrbit& orbit, int expected_dim,
                                const IntegrateOptions& integ, double tol) {
  MorseBottReport rep;
  rep.kernel_dim = monodromy_kernel_dim(H, orbit.x0, integ, tol);
  rep.is_morse_bott = rep.kernel_dim == expected_dim;
  return rep;
}

SpectrumResult action_spectrum(const HamiltonianField& H, const HomotopyClass& e,
                               const std::vector<LiftedPoint>& seeds,
                               const ShootOptions& opts) {
  SpectrumResult out;
  std::vector<std::pair<long long, long long>> keys;
  std::vector<double> actions;
  for (const LiftedPoint& seed : seeds) {
    OrbitSearchResult r = find_orbit(H, e, seed, opts);
    if (r.status != ShootStatus::converged) {
      ++out.skipped_seeds;
      continue;
    }
    ++out.converged_seeds;
    const double rad = norm2(r.orbit.x0.p);
    // Members of one torus family count once: key on rounded radius + action.
    const std::pair<long long, long long> key{
        static_cast<long long>(std::llround(rad * 1e5)),
        static_cast<long long>(std::llround(r.orbit.action * 1e6))};
    if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
    keys.push_back(key);
    actions.push_back(r.orbit.action);
  }
  out.actions = dedupe_sorted(std::move(actions), 1e-6);
  return out;
}

OrbitExistenceReport verify_orbit_existence(const HamiltonianField& H,
                                            const HomotopyClass& e,
                                            const std::vector<LiftedPoint>& seeds,
                                            const ShootOptions& opts) {
  OrbitExistenceReport rep;
  rep.floor_value = H.zero_section_infimum();
  rep.hypothesis_met = e.norm() <= rep.floor_value;
  double best = -1e300;
  for (const LiftedPoint& seed : seeds) {
    OrbitSearchResult r = find_orbit(H, e, seed, opts);
    if (r.status != ShootStatus::converged) continue;
    if (!rep.found || r.orbit.action > best) {
      rep.found = true;
      best = r.orbit.action;
      rep.orbit = std::move(r.orbit);
    }
  }
  rep.certified = rep.found && rep.orbit.action >= rep.floor_value - 1e-4;
  return rep;
}

LiftedPoint apply_factors(const std::vector<HamiltonianField>& factors,
                          const LiftedPoint& x0, const IntegrateOptions& opts) {
  LiftedPoint x = x0;
  for (const HamiltonianField& f : factors) x = integrate(f, x, 0.0, 1.0, opts);
  return x;
}

double factors_action(const std::vector<HamiltonianField>& factors,
                      const LiftedPoint& x0, const IntegrateOptions& opts) {
  LiftedPoint x = x0;
  double acc = 0.0;
  for (const HamiltonianField& f : factors) {
    Trajectory tr = integrate_trajectory(f, x, 0.0, 1.0, opts);
    acc += action_along(f, tr);
    x = LiftedPoint::from_flat(tr.back());
  }
  return acc;
}

Eigen::MatrixXd factors_jacobian(const std::vector<HamiltonianField>& factors,
                                 const LiftedPoint& x0,
                                 const IntegrateOptions& opts, double fd_step) {
  const int m = 2 * x0.dim();
  Eigen::MatrixXd J(m, m);
  const Vec base = x0.flat();
  for (int j = 0; j < m; ++j) {
    Vec hi = base, lo = base;
    hi[j] += fd_step;
    lo[j] -= fd_step;
    const Vec fhi = apply_factors(factors, LiftedPoint::from_flat(hi), opts).flat();
    const Vec flo = apply_factors(factors, LiftedPoint::from_flat(lo), opts).flat();
    for (int i = 0; i < m; ++i) J(i, j) = (fhi[i] - flo[i]) / (2.0 * fd_step);
  }
  return J;
}

ComposedFixResult find_composed_fixed_point(
    const std::vector<HamiltonianField>& factors, const Vec& v,
    const LiftedPoint& guess, const ShootOptions& opts) {
  if (static_cast<int>(v.size()) != guess.dim())
    throw std::invalid_argument("find_composed_fixed_point: v dim mismatch");
  auto map = [&](const Vec& x) {
    return apply_factors(factors, LiftedPoint::from_flat(x), opts.integ).flat();
  };
  auto jac = [&](const Vec& x) {
    return factors_jacobian(factors, LiftedPoint::from_flat(x), opts.integ,
                            opts.fd_step);
  };
  NewtonOutcome nw = newton_drive(map, jac, v, guess, opts);
  ComposedFixResult res;
  res.status = nw.status;
  res.x0 = LiftedPoint::from_flat(nw.x);
  res.residual = nw.residual;
  res.iters = nw.iters;
  res.jacobian_singular = nw.jacobian_singular;
  return res;
}

ChainFixResult find_composed_fixed_point_chain(
    const std::vector<HamiltonianField>& factors, const Vec& v,
    const LiftedPoint& guess, const ShootOptions& opts) {
  const int m = static_cast<int>(factors.size());
  if (m == 0)
    throw std::invalid_argument("find_composed_fixed_point_chain: no factors");
  const int n = guess.dim();
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument("find_composed_fixed_point_chain: v dim mismatch");
  const int d = 2 * n;
  const int N = m * d;

  // Seed the chain by pushing the guess forward. If that escapes the disc the
  // remaining points freeze at the last good state and Newton repairs them.
  std::vector<Vec> chain(m);
  chain[0] = guess.flat();
  for (int j = 1; j < m; ++j) {
    try {
      chain[j] =
          integrate(factors[j - 1], LiftedPoint::from_flat(chain[j - 1]), 0.0, 1.0,
                    opts.integ)
              .flat();
    } catch (const EscapeError&) {
      for (int r = j; r < m; ++r) chain[r] = chain[j - 1];
      break;
    }
  }

  auto eval = [&](const std::vector<Vec>& pts, Eigen::VectorXd& R) {
    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
      const Vec img =
          integrate(factors[j], LiftedPoint::from_flat(pts[j]), 0.0, 1.0, opts.integ)
              .flat();
      const Vec& nxt = pts[(j + 1) % m];
      for (int i = 0; i < d; ++i) {
        double target = nxt[i];
        if (j == m - 1 && i < n) target += v[i];
        R(j * d + i) = img[i] - target;
        worst = std::max(worst, std::fabs(img[i] - target));
      }
    }
    return worst;
  };

  ChainFixResult out;
  Eigen::VectorXd R(N);
  double rnorm = eval(chain, R);  // an escape here is the caller's problem
  for (int it = 0; it < opts.max_iters; ++it) {
    out.iters = it;
    if (rnorm <= opts.residual_tol) break;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
    for (int j = 0; j < m; ++j) {
      for (int col = 0; col < d; ++col) {
        Vec hi = chain[j], lo = chain[j];
        hi[col] += opts.fd_step;
        lo[col] -= opts.fd_step;
        const Vec fhi =
            integrate(factors[j], LiftedPoint::from_flat(hi), 0.0, 1.0, opts.integ)
                .flat();
        const Vec flo =
            integrate(factors[j], LiftedPoint::from_flat(lo), 0.0, 1.0, opts.integ)
                .flat();
        for (int row = 0; row < d; ++row)
          J(j * d + row, j * d + col) = (fhi[row] - flo[row]) / (2.0 * opts.fd_step);
      }
      const int wrap = ((j + 1) % m) * d;
      for (int row = 0; row < d; ++row) J(j * d + row, wrap + row) -= 1.0;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    const Eigen::VectorXd step = qr.solve(-R);
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 12; ++bt, lambda *= 0.5) {
      std::vector<Vec> trial(m, Vec(d));
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < d; ++i)
          trial[j][i] = chain[j][i] + lambda * step(j * d + i);
      Eigen::VectorXd Rt(N);
      double rt = 0.0;
      try {
        rt = eval(trial, Rt);
      } catch (const EscapeError&) {
        continue;  // trial wandered out of the disc, shorten the step
      }
      if (rt < rnorm) {
        chain = std::move(trial);
        R = std::move(Rt);
        rnorm = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stalled
  }
  if (rnorm <= opts.residual_tol) out.status = ShootStatus::converged;
  out.residual = rnorm;
  out.chain.reserve(m);
  for (const Vec& x : chain) out.chain.push_back(LiftedPoint::from_flat(x));
  return out;
}

int monodromy_kernel_dim(const HamiltonianField& H, const LiftedPoint& x0,
                         const IntegrateOptions& opts, double tol) {
  const int m = 2 * H.dim();
  const Eigen::MatrixXd J =
      flow_jacobian(H, x0, 0.0, 1.0, opts) - Eigen::MatrixXd::Identity(m, m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  int count = 0;
  for (int i = 0; i < m; ++i)
    if (svd.singularValues()(i) < tol) ++count;
  return count;
}

std::vector<double> dedupe_sorted(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values)
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  return out;
}

}  // namespace hamlab
