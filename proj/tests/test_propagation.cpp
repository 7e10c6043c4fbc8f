#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hamlab/families.hpp"
#include "hamlab/field.hpp"
#include "hamlab/phase.hpp"
#include "hamlab/propagation.hpp"

using namespace hamlab;

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

LiftedPoint pt1(double q, double p) { return LiftedPoint{{q}, {p}}; }

// Hermite fit of cos^2(pi r) on [0, 1/2] with an exact zero landing, the
// narrow-support profile the damped build requires.
ProfileFunction cos2_profile(int pieces = 32) {
  std::vector<Knot> knots;
  for (int j = 0; j < pieces; ++j) {
    const double r = 0.5 * j / pieces;
    double f = std::cos(kPi * r);
    f *= f;
    knots.push_back({r, f, -kPi * std::sin(2.0 * kPi * r),
                     -2.0 * kPi * kPi * std::cos(2.0 * kPi * r)});
  }
  knots.push_back({0.5, 0.0, 0.0, 0.0});
  return ProfileFunction::from_knots(std::move(knots));
}

std::vector<LiftedPoint> momentum_line(int count, double cap) {
  std::vector<LiftedPoint> grid;
  for (int i = 0; i < count; ++i)
    grid.push_back(pt1(0.0, -cap + 2.0 * cap * i / (count - 1)));
  return grid;
}

}  // namespace

TEST_CASE("constant system steps are the exact profile translation") {
  HamiltonianField h = make_momentum_hamiltonian(1, cut_parabola(2.0));
  SequentialSystem sys = SequentialSystem::constant(h);
  CHECK(sys.kind() == SystemKind::constant);
  CHECK(sys.dim() == 1);
  CHECK(sys.zero_section_bound() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sys.perturbation_bound() == 0.0);

  Trajectory t = evolve(sys, pt1(0.1, -0.25), 5);
  REQUIRE(t.states.size() == 6);
  for (int j = 0; j <= 5; ++j) {
    CHECK(t.times[j] == double(j));
    CHECK(t.states[j][0] == doctest::Approx(0.1 + j).epsilon(1e-12));
    CHECK(t.states[j][1] == -0.25);
  }

  auto factors = sys.factor_fields(3);
  CHECK(factors.size() == 3);
}

TEST_CASE("perturbed system: audited generators, interleaved factors") {
  HamiltonianField base = make_momentum_hamiltonian(1, cut_parabola(2.0));
  PerturbationProvider prov;
  prov.dim = 1;
  prov.bound = 0.05;
  prov.seed = 3;

  // deterministic and strictly inside the oscillation budget
  HamiltonianField g5a = prov.generator(5);
  HamiltonianField g5b = prov.generator(5);
  double lo = 1e30, hi = -1e30;
  for (int i = 0; i < 64; ++i) {
    double q[1] = {double(i) / 64.0}, p[1] = {0.2};
    double va = g5a.value(0.0, q, p);
    CHECK(va == g5b.value(0.0, q, p));
    lo = std::min(lo, va);
    hi = std::max(hi, va);
  }
  CHECK(hi - lo < 0.05);
  CHECK(hi - lo > 0.0);  // the bump is not degenerate

  SequentialSystem sys = SequentialSystem::perturbed(base, prov);
  CHECK(sys.kind() == SystemKind::perturbed);
  CHECK(sys.perturbation_bound() == 0.05);
  CHECK(sys.zero_section_bound() == doctest::Approx(2.0).epsilon(1e-12));

  // factor fields replay the same composite the stepper applies
  LiftedPoint x0 = pt1(0.2, -0.3);
  Trajectory t = evolve(sys, x0, 2);
  auto factors = sys.factor_fields(2);
  CHECK(factors.size() == 4);
  LiftedPoint y = x0;
  for (const auto& f : factors) {
    IntegrateOptions o = sys.integrate_options();
    y = integrate(f, y, 0.0, 1.0, o);
  }
  CHECK(y.q[0] == doctest::Approx(t.back()[0]).epsilon(1e-9));
  CHECK(y.p[0] == doctest::Approx(t.back()[1]).epsilon(1e-9));
}

TEST_CASE("birkhoff average of a constant translation is exact") {
  HamiltonianField h = make_momentum_hamiltonian(1, cut_parabola(2.0));
  SequentialSystem sys = SequentialSystem::constant(h);
  // f'(1/4) = -1 with momentum -1/4 moves q by +1 every step
  Vec avg = birkhoff_average(sys, pt1(0.7, -0.25), 7);
  CHECK(avg[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(birkhoff_average(sys, pt1(0.0, 0.0), 0));

  double m = birkhoff_average_observable(
      sys, pt1(0.0, -0.25), 5,
      [](const LiftedPoint& x, const std::vector<double>&) { return x.p[0]; });
  CHECK(m == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("skew product drives a base-dependent field deterministically") {
  SkewProductSystem sk;
  sk.base_dim = 1;
  sk.alpha = {0.377};
  sk.y0 = {0.2};
  sk.field_of = [](const std::vector<double>& y) {
    return cosine_bump(1, {1}, 0.05 * std::cos(2.0 * kPi * y[0]), 0.0);
  };
  SequentialSystem sys = SequentialSystem::skew_product(sk);
  CHECK(sys.kind() == SystemKind::skew_product);
  CHECK(sys.dim() == 1);
  CHECK(sys.zero_section_bound() == 0.0);
  REQUIRE(sys.skew() != nullptr);

  Trajectory a = evolve(sys, pt1(0.1, 0.2), 4);
  Trajectory b = evolve(sys, pt1(0.1, 0.2), 4);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t j = 0; j < a.states.size(); ++j)
    for (int d = 0; d < 2; ++d) CHECK(a.states[j][d] == b.states[j][d]);
}

TEST_CASE("propagation speed: identity pins zero, translation spreads") {
  SequentialSystem id = SequentialSystem::constant(zero_field(1));
  auto res0 = propagation_speed(id, 8, momentum_line(60, 0.9));
  CHECK(res0.speed_estimate == 0.0);
  CHECK(res0.radius.back() == 0.0);

  HamiltonianField h = make_momentum_hamiltonian(1, cut_parabola(1.0));
  SequentialSystem sys = SequentialSystem::constant(h);
  auto res = propagation_speed(sys, 12, momentum_line(200, 0.999));
  REQUIRE(res.radius.size() == 12);
  REQUIRE(res.radius_over_k.size() == 12);
  CHECK(res.speed_estimate == doctest::Approx(res.radius.back() / 12.0).epsilon(1e-12));
  CHECK(res.speed_estimate > 0.8);
  for (std::size_t j = 0; j < res.radius.size(); ++j)
    CHECK(res.radius_over_k[j] ==
          doctest::Approx(res.radius[j] / double(j + 1)).epsilon(1e-12));
}

TEST_CASE("damped build measures the slope bound and escape time") {
  DampedSystem d(cos2_profile(), [](double s) {
    if (std::fabs(s) >= 0.75) return s;
    return s + 0.28 * (0.5625 - s * s);
  });
  SequentialSystem sys = build_damped_system(std::move(d));
  CHECK(sys.kind() == SystemKind::damped);
  REQUIRE(sys.damped() != nullptr);
  CHECK(sys.damped()->gamma == doctest::Approx(kPi).epsilon(1e-3));
  CHECK(sys.damped()->escape_steps == 14);
  CHECK_THROWS(sys.factor_fields(1));  // compression is not a Hamiltonian flow

  DampedBoundReport rep = verify_damped_bound(sys, momentum_line(80, 0.999), 120);
  CHECK(rep.holds);
  CHECK(rep.bound ==
        doctest::Approx((sys.damped()->escape_steps + 1) * sys.damped()->gamma)
            .epsilon(1e-12));
  CHECK(rep.max_displacement < rep.bound);
  CHECK(rep.max_displacement > 0.0);
}

TEST_CASE("damped build rejects broken compression maps") {
  // decreasing inside the window
  DampedSystem bad(cos2_profile(), [](double s) {
    if (std::fabs(s) >= 0.75) return s;
    return s - 0.4 * (0.5625 - s * s);
  });
  CHECK_THROWS(build_damped_system(std::move(bad)));
  // wide support profile
  DampedSystem wide(cut_parabola(2.0), [](double s) {
    if (std::fabs(s) >= 0.75) return s;
    return s + 0.28 * (0.5625 - s * s);
  });
  CHECK_THROWS(build_damped_system(std::move(wide)));
}

TEST_CASE("displacement fixed point in the unperturbed system") {
  HamiltonianField h = make_momentum_hamiltonian(1, cut_parabola(2.0));
  SequentialSystem sys = SequentialSystem::constant(h);
  HomotopyClass v;
  v.e = {3};
  FixedPointSearchOptions o;
  o.p_resolution = 17;
  o.q_resolution = 3;
  FixedPointReport rep = find_displacement_fixed_point(sys, 2, v, o);
  CHECK(rep.hypothesis_met);  // |3| < 2 (2 - 0)
  CHECK(rep.hypothesis_margin == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(rep.found);
  CHECK(rep.residual <= 1e-7);
  REQUIRE(rep.orbit.size() == 2);
  // per-step displacement 3/2 needs f'(r) = -3/2, r = 3/8 on the parabola
  CHECK(std::fabs(rep.x0.p[0]) == doctest::Approx(0.375).epsilon(1e-6));

  HomotopyClass far;
  far.e = {5};
  FixedPointReport miss = find_displacement_fixed_point(sys, 2, far, o);
  CHECK_FALSE(miss.hypothesis_met);  // 5 >= 2 (2 - 0)
}

TEST_CASE("rotation set: identity concentrates at the origin") {
  SequentialSystem id = SequentialSystem::constant(zero_field(1));
  RotationSetOptions o;
  o.phase_resolution = 5;
  RotationSetEstimate est = rotation_set_estimate(id, 10, o);
  REQUIRE(!est.vectors.empty());
  for (const Vec& v : est.vectors) CHECK(v[0] == 0.0);
  // the degenerate interval collapses to the single point 0
  REQUIRE(est.hull.size() == 1);
  CHECK(est.hull[0][0] == 0.0);
  CHECK(est.inscribed_radius == 0.0);
}

TEST_CASE("rotation set of a constant translation spans an interval") {
  HamiltonianField h = make_momentum_hamiltonian(1, cut_parabola(1.0));
  SequentialSystem sys = SequentialSystem::constant(h);
  RotationSetOptions o;
  o.phase_resolution = 6;
  RotationSetEstimate est = rotation_set_estimate(sys, 20, o);
  REQUIRE(est.hull.size() == 2);
  CHECK(est.hull[0][0] < -0.5);
  CHECK(est.hull[1][0] > 0.5);
  CHECK(est.inscribed_radius > 0.5);
  CHECK(est.extremal_points.size() == est.hull.size());
  CHECK(!est.extremal_samples.empty());
}
