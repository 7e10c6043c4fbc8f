#include "hamlab/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "hamlab/hofer.hpp"
#include "hamlab/rng.hpp"

namespace hamlab {

namespace {

double frac(double x) { return x - std::floor(x); }

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<double> base_point_at(const SkewProductSystem& sk, long i) {
  std::vector<double> y(sk.y0);
  for (std::size_t d = 0; d < y.size(); ++d)
    y[d] = frac(y[d] + static_cast<double>(i) * sk.alpha[d]);
  return y;
}

}  // namespace

HamiltonianField PerturbationProvider::generator(int i) const {
  CounterRng rng{seed, static_cast<std::uint64_t>(i)};
  std::vector<std::int64_t> wave(dim, 0);
  std::uint64_t ctr = 0;
  bool all_zero = true;
  do {
    all_zero = true;
    for (int d = 0; d < dim; ++d) {
      wave[d] = static_cast<std::int64_t>(rng.pick(ctr++, 5)) - 2;
      if (wave[d] != 0) all_zero = false;
    }
  } while (all_zero);
  const double phase = rng.uniform(ctr++);
  // Oscillation of a cosine bump is exactly twice its amplitude, so 0.45 a
  // leaves headroom under the strict budget; the sample audit re-checks.
  const double amp = 0.45 * bound;
  HamiltonianField g = cosine_bump(dim, wave, amp, phase, 0.0);
  SampleSpec audit;
  audit.space_points = 4096;
  audit.time_points = 8;
  audit.seed = mix64(seed ^ static_cast<std::uint64_t>(i));
  if (!(sampled_oscillation(g, audit) < bound))
    throw std::logic_error("PerturbationProvider: generated oscillation reached the budget");
  return g;
}

struct SequentialSystem::FactorCache {
  std::mutex mu;
  std::map<int, HamiltonianField> memo;
};

SequentialSystem SequentialSystem::constant(HamiltonianField H,
                                            const IntegrateOptions& opts) {
  SequentialSystem s;
  s.kind_ = SystemKind::constant;
  s.dim_ = H.dim();
  s.base_ = std::make_shared<const HamiltonianField>(std::move(H));
  s.opts_ = opts;
  return s;
}

SequentialSystem SequentialSystem::perturbed(HamiltonianField base,
                                             PerturbationProvider provider,
                                             const IntegrateOptions& opts) {
  if (provider.dim != base.dim())
    throw std::invalid_argument("SequentialSystem::perturbed: dimension mismatch");
  if (!(provider.bound > 0.0))
    throw std::invalid_argument("SequentialSystem::perturbed: bound must be positive");
  SequentialSystem s;
  s.kind_ = SystemKind::perturbed;
  s.dim_ = base.dim();
  s.base_ = std::make_shared<const HamiltonianField>(std::move(base));
  s.provider_ = provider;
  s.opts_ = opts;
  s.cache_ = std::make_shared<FactorCache>();
  return s;
}

SequentialSystem SequentialSystem::skew_product(SkewProductSystem sk,
                                                const IntegrateOptions& opts) {
  if (sk.base_dim < 1 || sk.alpha.size() != static_cast<std::size_t>(sk.base_dim) ||
      sk.y0.size() != static_cast<std::size_t>(sk.base_dim))
    throw std::invalid_argument("SequentialSystem::skew_product: base sizes disagree");
  if (!sk.field_of)
    throw std::invalid_argument("SequentialSystem::skew_product: missing field map");
  SequentialSystem s;
  s.kind_ = SystemKind::skew_product;
  s.dim_ = sk.field_of(sk.y0).dim();
  s.skew_ = std::make_shared<const SkewProductSystem>(std::move(sk));
  s.opts_ = opts;
  return s;
}

LiftedPoint SequentialSystem::step(int i, const LiftedPoint& x) const {
  if (i < 1) throw std::invalid_argument("SequentialSystem::step: index starts at 1");
  switch (kind_) {
    case SystemKind::constant:
      return time_one_map(*base_, x, opts_);
    case SystemKind::perturbed: {
      LiftedPoint mid = time_one_map(*base_, x, opts_);
      HamiltonianField g = [&] {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->memo.find(i);
        if (it == cache_->memo.end())
          it = cache_->memo.emplace(i, provider_.generator(i)).first;
        return it->second;
      }();
      return time_one_map(g, mid, opts_);
    }
    case SystemKind::skew_product: {
      HamiltonianField g = skew_->field_of(base_point_at(*skew_, i - 1));
      return time_one_map(g, x, opts_);
    }
    case SystemKind::damped: {
      LiftedPoint y = x;
      const double p = y.p[0];
      y.q[0] += damped_->profile.deriv(std::fabs(p)) * sgn(p);
      y.p[0] = damped_->u(p);
      return y;
    }
  }
  throw std::logic_error("SequentialSystem::step: bad kind");
}

std::vector<HamiltonianField> SequentialSystem::factor_fields(int k) const {
  if (k < 1) throw std::invalid_argument("factor_fields: k must be positive");
  std::vector<HamiltonianField> out;
  switch (kind_) {
    case SystemKind::constant:
      out.assign(k, *base_);
      return out;
    case SystemKind::perturbed:
      out.reserve(2 * k);
      for (int i = 1; i <= k; ++i) {
        out.push_back(*base_);
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->memo.find(i);
        if (it == cache_->memo.end())
          it = cache_->memo.emplace(i, provider_.generator(i)).first;
        out.push_back(it->second);
      }
      return out;
    case SystemKind::skew_product:
      out.reserve(k);
      for (int i = 0; i < k; ++i)
        out.push_back(skew_->field_of(base_point_at(*skew_, i)));
      return out;
    case SystemKind::damped:
      throw std::logic_error(
          "factor_fields: the damped momentum compression is not generated by a field");
  }
  throw std::logic_error("factor_fields: bad kind");
}

double SequentialSystem::zero_section_bound() const {
  if (kind_ == SystemKind::skew_product) return 0.0;
  return base_->zero_section_infimum();
}

double SequentialSystem::perturbation_bound() const {
  return kind_ == SystemKind::perturbed ? provider_.bound : 0.0;
}

const HamiltonianField* SequentialSystem::base_field() const {
  return base_ ? base_.get() : nullptr;
}

SequentialSystem build_damped_system(DampedSystem spec) {
  if (!spec.u) throw std::invalid_argument("build_damped_system: missing u");
  if (!(spec.profile.support_end() <= 0.5))
    throw std::invalid_argument(
        "build_damped_system: profile must vanish outside |p| < 1/2");
  // Momentum-map invariants on a dense grid of [-1, 1].
  const int ugrid = 4096;
  double prev = spec.u(-1.0);
  if (std::fabs(prev - (-1.0)) > 1e-12)
    throw std::invalid_argument("build_damped_system: u(-1) != -1");
  for (int j = 1; j <= ugrid; ++j) {
    const double s = -1.0 + 2.0 * j / ugrid;
    const double us = spec.u(s);
    if (!(us > prev))
      throw std::invalid_argument("build_damped_system: u not strictly increasing");
    if (std::fabs(s) >= 0.75 - 1e-15) {
      if (std::fabs(us - s) > 1e-12)
        throw std::invalid_argument("build_damped_system: u must fix |s| >= 3/4");
    } else {
      if (!(us > s))
        throw std::invalid_argument("build_damped_system: u(s) > s required inside (-3/4, 3/4)");
    }
    prev = us;
  }
  for (double s : {0.75, -0.75})
    if (std::fabs(spec.u(s) - s) > 1e-12)
      throw std::invalid_argument("build_damped_system: u(+-3/4) != +-3/4");
  // Slope bound of the kick.
  const int ggrid = 8192;
  double gamma = 0.0;
  for (int j = 0; j <= ggrid; ++j)
    gamma = std::max(gamma, std::fabs(spec.profile.deriv(static_cast<double>(j) / ggrid)));
  spec.gamma = gamma;
  // Steps to push -2/3 past +2/3.
  double s = -2.0 / 3.0;
  long n = 0;
  const long cap = 1000000;
  while (s <= 2.0 / 3.0) {
    s = spec.u(s);
    if (++n > cap)
      throw std::invalid_argument("build_damped_system: escape iteration exceeded 1e6 steps");
  }
  spec.escape_steps = n;

  SequentialSystem sys;
  sys.kind_ = SystemKind::damped;
  sys.dim_ = 1;
  sys.base_ = std::make_shared<const HamiltonianField>(
      make_momentum_hamiltonian(1, spec.profile));
  sys.damped_ = std::make_shared<const DampedSystem>(std::move(spec));
  return sys;
}

Trajectory evolve(const SequentialSystem& system, const LiftedPoint& x0, int k) {
  if (k < 0) throw std::invalid_argument("evolve: k must be nonnegative");
  Trajectory traj;
  traj.n = system.dim();
  traj.times.reserve(k + 1);
  traj.states.reserve(k + 1);
  LiftedPoint x = x0;
  traj.times.push_back(0.0);
  traj.states.push_back(x.flat());
  for (int j = 1; j <= k; ++j) {
    x = system.step(j, x);
    traj.times.push_back(static_cast<double>(j));
    traj.states.push_back(x.flat());
  }
  return traj;
}

namespace {

std::vector<std::array<double, 2>> fan_directions(int n) {
  if (n == 1) return {{1.0, 0.0}, {-1.0, 0.0}};
  std::vector<std::array<double, 2>> dirs(64);
  for (int i = 0; i < 64; ++i) {
    const double th = 2.0 * M_PI * i / 64.0;
    dirs[i] = {std::cos(th), std::sin(th)};
  }
  return dirs;
}

double grid_dispersion(const std::vector<LiftedPoint>& grid, int n) {
  double disp = 0.0;
  std::vector<double> coords(grid.size());
  for (int axis = 0; axis < 2 * n; ++axis) {
    for (std::size_t m = 0; m < grid.size(); ++m)
      coords[m] = axis < n ? grid[m].q[axis] : grid[m].p[axis - n];
    std::sort(coords.begin(), coords.end());
    for (std::size_t m = 1; m < coords.size(); ++m)
      disp = std::max(disp, coords[m] - coords[m - 1]);
  }
  return disp;
}

// Largest fan-covered radius for one displacement cloud. Coverage per
// direction is a union of candidate-level intervals obtained from the
// quadratic |v - r dir|^2 <= (0.05 |v| + disp)^2 in r, accumulated in
// difference arrays and intersected across directions.
double covered_radius(const std::vector<std::array<double, 2>>& cloud, int n,
                      double disp) {
  double rmax = 0.0;
  for (const auto& v : cloud) rmax = std::max(rmax, std::hypot(v[0], v[1]));
  if (rmax == 0.0) return 0.0;
  const int levels = 512;
  const double step = rmax / levels;
  const auto dirs = fan_directions(n);
  std::vector<int> covered(levels + 1, 1);
  std::vector<int> diff(levels + 2);
  for (const auto& dir : dirs) {
    std::fill(diff.begin(), diff.end(), 0);
    for (const auto& v : cloud) {
      const double vn = std::hypot(v[0], v[1]);
      const double tol = 0.05 * vn + disp;
      const double proj = v[0] * dir[0] + v[1] * dir[1];
      const double perp2 = std::max(0.0, vn * vn - proj * proj);
      const double h2 = tol * tol - perp2;
      if (h2 < 0.0) continue;
      const double half = std::sqrt(h2);
      const double lo = std::max(0.0, proj - half);
      const double hi = std::min(rmax, proj + half);
      if (hi < lo) continue;
      const int ilo = static_cast<int>(std::ceil(lo / step - 1e-12));
      const int ihi = static_cast<int>(std::floor(hi / step + 1e-12));
      if (ihi < ilo) continue;
      diff[ilo] += 1;
      diff[ihi + 1] -= 1;
    }
    int run = 0;
    for (int lev = 0; lev <= levels; ++lev) {
      run += diff[lev];
      if (run <= 0) covered[lev] = 0;
    }
  }
  for (int lev = levels; lev >= 0; --lev)
    if (covered[lev]) return lev * step;
  return 0.0;
}

}  // namespace

PropagationSpeedResult propagation_speed(const SequentialSystem& system, int k,
                                         const std::vector<LiftedPoint>& grid) {
  if (k < 1) throw std::invalid_argument("propagation_speed: k must be positive");
  if (grid.empty()) throw std::invalid_argument("propagation_speed: empty grid");
  const int n = system.dim();
  if (n > 2)
    throw std::invalid_argument("propagation_speed: fan coverage supports n <= 2 only");
  PropagationSpeedResult out;
  out.grid_dispersion = grid_dispersion(grid, n);
  std::vector<LiftedPoint> cur = grid;
  std::vector<std::array<double, 2>> cloud(grid.size());
  for (int j = 1; j <= k; ++j) {
    for (std::size_t m = 0; m < cur.size(); ++m) {
      cur[m] = system.step(j, cur[m]);
      cloud[m] = {cur[m].q[0] - grid[m].q[0],
                  n == 2 ? cur[m].q[1] - grid[m].q[1] : 0.0};
    }
    const double r = covered_radius(cloud, n, out.grid_dispersion);
    out.radius.push_back(r);
    out.radius_over_k.push_back(r / j);
  }
  out.speed_estimate = out.radius.back() / k;
  return out;
}

FixedPointReport find_displacement_fixed_point(const SequentialSystem& system,
                                               int k, const HomotopyClass& v,
                                               const FixedPointSearchOptions& opts) {
  if (k < 1)
    throw std::invalid_argument("find_displacement_fixed_point: k must be positive");
  const int n = system.dim();
  if (v.dim() != n)
    throw std::invalid_argument("find_displacement_fixed_point: class dimension mismatch");
  FixedPointReport report;
  const double c = system.zero_section_bound();
  const double a = system.perturbation_bound();
  report.hypothesis_margin = k * (c - a) - v.norm();
  report.hypothesis_met = v.norm() < k * (c - a);

  const std::vector<HamiltonianField> factors = system.factor_fields(k);
  Vec vreal(n);
  for (int d = 0; d < n; ++d) vreal[d] = static_cast<double>(v.e[d]);

  // Seed grid over the fundamental cell, q and p resolutions independent.
  std::vector<LiftedPoint> seeds;
  {
    const int qr = std::max(1, opts.q_resolution);
    const int pr = std::max(1, opts.p_resolution);
    const double cap = 0.97;
    const long total_q = static_cast<long>(std::pow(qr, n));
    const long total_p = static_cast<long>(std::pow(pr, n));
    for (long a_q = 0; a_q < total_q; ++a_q) {
      Vec q(n);
      long rem = a_q;
      for (int d = 0; d < n; ++d) {
        const int i = static_cast<int>(rem % qr);
        rem /= qr;
        q[d] = qr == 1 ? 0.0 : -0.5 + static_cast<double>(i) / (qr - 1);
      }
      for (long a_p = 0; a_p < total_p; ++a_p) {
        Vec p(n);
        rem = a_p;
        double p2 = 0.0;
        for (int d = 0; d < n; ++d) {
          const int i = static_cast<int>(rem % pr);
          rem /= pr;
          p[d] = pr == 1 ? 0.0 : -cap + 2.0 * cap * static_cast<double>(i) / (pr - 1);
          p2 += p[d] * p[d];
        }
        if (p2 <= cap * cap) seeds.push_back(LiftedPoint{q, p});
      }
    }
  }

  // Promising seeds first: unperturbed k-step displacement close to v.
  const HamiltonianField* base = system.base_field();
  std::vector<double> score(seeds.size(), 0.0);
  for (std::size_t m = 0; m < seeds.size(); ++m) {
    if (base) {
      Vec g = base->grad_p(0.0, seeds[m].q, seeds[m].p);
      double s2 = 0.0;
      for (int d = 0; d < n; ++d) {
        const double diff = k * g[d] - vreal[d];
        s2 += diff * diff;
      }
      score[m] = s2;
    }
  }
  std::vector<std::size_t> order(seeds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return score[x] < score[y]; });

  ShootOptions shoot = opts.shoot;
  shoot.residual_tol = opts.residual_tol;
  shoot.integ = system.integrate_options();
  const int limit = opts.max_seeds > 0
                        ? std::min<int>(opts.max_seeds, static_cast<int>(seeds.size()))
                        : static_cast<int>(seeds.size());
  for (int t = 0; t < limit; ++t) {
    const LiftedPoint& seed = seeds[order[t]];
    ++report.seeds_tried;
    ChainFixResult res;
    try {
      res = find_composed_fixed_point_chain(factors, vreal, seed, shoot);
    } catch (const EscapeError&) {
      // A Newton iterate wandered past |p| = 1; this seed is a dead end, the
      // next one starts fresh inside the disc.
      continue;
    }
    if (res.status == ShootStatus::converged && res.residual <= opts.residual_tol) {
      report.found = true;
      report.x0 = res.chain.front();
      report.orbit = std::move(res.chain);
      report.residual = res.residual;
      report.newton_iters = res.iters;
      return report;
    }
  }
  return report;
}

Vec birkhoff_average(const SequentialSystem& system, const LiftedPoint& x0, int N) {
  if (N < 1) throw std::invalid_argument("birkhoff_average: N must be positive");
  const int n = system.dim();
  Vec sum(n, 0.0);
  LiftedPoint x = x0;
  for (int i = 1; i <= N; ++i) {
    LiftedPoint y = system.step(i, x);
    for (int d = 0; d < n; ++d) sum[d] += y.q[d] - x.q[d];
    x = y;
  }
  for (double& s : sum) s /= N;
  return sum;
}

double birkhoff_average_observable(
    const SequentialSystem& system, const LiftedPoint& x0, int N,
    const std::function<double(const LiftedPoint&, const std::vector<double>&)>& w) {
  if (N < 1) throw std::invalid_argument("birkhoff_average_observable: N must be positive");
  if (!w) throw std::invalid_argument("birkhoff_average_observable: missing observable");
  double sum = 0.0;
  LiftedPoint x = x0;
  const SkewProductSystem* sk = system.skew();
  for (int i = 0; i < N; ++i) {
    sum += w(x, sk ? base_point_at(*sk, i) : std::vector<double>{});
    x = system.step(i + 1, x);
  }
  return sum / N;
}

RotationSetEstimate rotation_set_estimate(const SequentialSystem& system, int k,
                                          const RotationSetOptions& opts) {
  if (k < 1) throw std::invalid_argument("rotation_set_estimate: k must be positive");
  const int n = system.dim();
  if (n > 2)
    throw std::invalid_argument(
        "rotation_set_estimate: hulls are exact only for n <= 2; higher dimensions "
        "are not supported");
  const std::vector<LiftedPoint> phase_grid =
      sample_fundamental_domain(n, opts.phase_resolution, opts.momentum_cap);

  // Base-point grid: only skew products have base variation.
  std::vector<std::vector<double>> bases;
  if (const SkewProductSystem* sk = system.skew()) {
    const int br = std::max(1, opts.base_resolution);
    const long total = static_cast<long>(std::pow(br, sk->base_dim));
    for (long t = 0; t < total; ++t) {
      std::vector<double> y(sk->base_dim);
      long rem = t;
      for (int d = 0; d < sk->base_dim; ++d) {
        y[d] = static_cast<double>(rem % br) / br;
        rem /= br;
      }
      bases.push_back(std::move(y));
    }
  } else {
    bases.push_back({});
  }

  RotationSetEstimate est;
  std::vector<Point2> pts;
  for (const auto& y : bases) {
    SequentialSystem sys = system;
    if (const SkewProductSystem* sk = system.skew()) {
      SkewProductSystem moved = *sk;
      moved.y0 = y;
      sys = SequentialSystem::skew_product(std::move(moved), system.integrate_options());
    }
    for (const LiftedPoint& x0 : phase_grid) {
      if (opts.max_samples > 0 &&
          static_cast<int>(est.vectors.size()) >= opts.max_samples)
        break;
      LiftedPoint x = x0;
      try {
        for (int j = 1; j <= k; ++j) x = sys.step(j, x);
      } catch (const EscapeError&) {
        // This orbit left the momentum disc before completing k steps; it
        // contributes no rotation vector. Samples that survive still give an
        // inner approximation of the set.
        continue;
      }
      Vec v(n);
      for (int d = 0; d < n; ++d) v[d] = (x.q[d] - x0.q[d]) / k;
      pts.push_back({v[0], n == 2 ? v[1] : 0.0});
      est.vectors.push_back(std::move(v));
    }
  }
  if (pts.empty())
    throw std::runtime_error(
        "rotation_set_estimate: every sampled orbit escaped the momentum disc");

  if (n == 1) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    est.hull = {{lo, 0.0}};
    if (hi > lo) est.hull.push_back({hi, 0.0});
    est.inscribed_radius =
        (lo <= 0.0 && hi >= 0.0) ? std::max(0.0, std::min(-lo, hi)) : 0.0;
  } else {
    est.hull = convex_hull_2d(pts);
    est.inscribed_radius = inscribed_radius_about_origin(est.hull);
    for (const auto& p : pts)
      if (!hull_contains(est.hull, p, 1e-12))
        throw std::logic_error("rotation_set_estimate: hull failed to contain a sample");
  }
  est.extremal_points = est.hull;
  for (std::size_t m = 0; m < pts.size(); ++m) {
    for (const auto& vtx : est.hull) {
      if (std::hypot(pts[m][0] - vtx[0], pts[m][1] - vtx[1]) <= 1e-2) {
        est.extremal_samples.push_back(static_cast<int>(m));
        break;
      }
    }
  }
  return est;
}

DampedBoundReport verify_damped_bound(const SequentialSystem& system,
                                      const std::vector<LiftedPoint>& grid, int k) {
  const DampedSystem* spec = system.damped();
  if (!spec)
    throw std::invalid_argument("verify_damped_bound: needs a damped-kind system");
  if (grid.empty()) throw std::invalid_argument("verify_damped_bound: empty grid");
  DampedBoundReport rep;
  rep.bound = static_cast<double>(spec->escape_steps + 1) * spec->gamma;
  for (const LiftedPoint& x0 : grid) {
    LiftedPoint x = x0;
    for (int j = 1; j <= k; ++j) {
      x = system.step(j, x);
      rep.max_displacement =
          std::max(rep.max_displacement, std::fabs(x.q[0] - x0.q[0]));
    }
  }
  rep.holds = rep.max_displacement <= rep.bound + 1e-9;
  return rep;
}

}  // namespace hamlab
