#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hamlab/families.hpp"
#include "hamlab/profile.hpp"
#include "hamlab/rng.hpp"

using namespace hamlab;

TEST_CASE("cut parabola reproduces the parabola exactly before the cut") {
  ProfileFunction f = cut_parabola(2.0, 0.9, 0.97);
  // the knot table stores polynomial pieces of degree <= 5 exactly, so the
  // parabola section is not an approximation
  for (double r : {0.0, 0.1, 0.25, 0.5, 0.7, 0.89, 0.9}) {
    Jet j = f.eval(r);
    CHECK(j.f == doctest::Approx(2.0 * (1.0 - r * r)).epsilon(1e-15));
    CHECK(j.fp == doctest::Approx(-4.0 * r).epsilon(1e-14));
    CHECK(j.fpp == doctest::Approx(-4.0).epsilon(1e-14));
  }
  CHECK(f.value(0.0) == 2.0);
  CHECK(f.deriv(0.0) == 0.0);
}

TEST_CASE("profiles vanish identically beyond their support") {
  ProfileFunction f = cut_parabola(1.5);
  CHECK(f.support_end() <= 0.97);
  for (double r : {f.support_end(), 0.98, 1.0, 3.5}) {
    Jet j = f.eval(r);
    CHECK(j.f == 0.0);
    CHECK(j.fp == 0.0);
    CHECK(j.fpp == 0.0);
  }
}

TEST_CASE("cut parabola release is monotone decreasing across the cut") {
  ProfileFunction f = cut_parabola(2.0, 0.9, 0.97);
  double prev = f.value(0.9);
  for (int i = 1; i <= 200; ++i) {
    double r = 0.9 + 0.07 * i / 200.0;
    double v = f.value(r);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  CHECK(f.value(0.97) == 0.0);
}

TEST_CASE("serialization round-trips the knot table exactly") {
  ProfileFunction f = cut_parabola(2.718281828459045, 0.8125, 0.9375);
  std::string text = f.serialize();
  ProfileFunction g = ProfileFunction::deserialize(text);
  REQUIRE(g.knots().size() == f.knots().size());
  for (std::size_t i = 0; i < f.knots().size(); ++i) {
    CHECK(g.knots()[i].r == f.knots()[i].r);
    CHECK(g.knots()[i].f == f.knots()[i].f);
    CHECK(g.knots()[i].fp == f.knots()[i].fp);
    CHECK(g.knots()[i].fpp == f.knots()[i].fpp);
  }
  // and evaluation agrees bit for bit
  for (double r : {0.05, 0.3141, 0.5, 0.82, 0.93, 0.96})
    CHECK(f.value(r) == g.value(r));
  CHECK(text == g.serialize());
}

TEST_CASE("deserialize rejects malformed text") {
  CHECK_THROWS_AS(ProfileFunction::deserialize("garbage"), std::exception);
  CHECK_THROWS_AS(ProfileFunction::deserialize("profile-v2 2\n0,1,0,0\n0.5,0,0,0\n"),
                  std::exception);
}

TEST_CASE("from_knots validates its clauses") {
  // first knot must sit at r = 0 with f' = 0
  CHECK_THROWS(ProfileFunction::from_knots({{0.1, 1, 0, 0}, {0.5, 0, 0, 0}}));
  CHECK_THROWS(ProfileFunction::from_knots({{0.0, 1, 0.2, 0}, {0.5, 0, 0, 0}}));
  // last knot must be a zero state strictly inside [0, 1)
  CHECK_THROWS(ProfileFunction::from_knots({{0.0, 1, 0, 0}, {1.0, 0, 0, 0}}));
  CHECK_THROWS(ProfileFunction::from_knots({{0.0, 1, 0, 0}, {0.5, 0.1, 0, 0}}));
  // knots must increase strictly
  CHECK_THROWS(ProfileFunction::from_knots(
      {{0.0, 1, 0, 0}, {0.5, 0.5, -1, 0}, {0.5, 0, 0, 0}}));
  // a valid minimal table passes
  CHECK_NOTHROW(ProfileFunction::from_knots({{0.0, 1, 0, -2}, {0.5, 0, 0, 0}}));
}

TEST_CASE("eval_many is bit-identical to pointwise eval") {
  ProfileFunction f = cut_parabola(2.2, 0.85, 0.95);
  CounterRng rng{4242, 0};
  const std::size_t n = 501;  // odd length hits the SIMD tail path
  std::vector<double> r(n), fv(n), fpv(n), fppv(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = rng.uniform(i, 0.0, 1.2);
  f.eval_many(r.data(), n, fv.data(), fpv.data(), fppv.data());
  for (std::size_t i = 0; i < n; ++i) {
    Jet j = f.eval(r[i]);
    CHECK(fv[i] == j.f);
    CHECK(fpv[i] == j.fp);
    CHECK(fppv[i] == j.fpp);
  }
  // null slots skip components without disturbing the others
  std::vector<double> only_f(n);
  f.eval_many(r.data(), n, only_f.data(), nullptr, nullptr);
  CHECK(only_f == fv);
}

TEST_CASE("evaluation requires r >= 0") {
  ProfileFunction f = cut_parabola(1.0);
  CHECK_THROWS(f.eval(-0.25));
}

TEST_CASE("ramp jet: endpoints, symmetry, single interior inflection") {
  CHECK(ramp(0.0) == 0.0);
  CHECK(ramp(1.0) == 1.0);
  Jet a = ramp_jet(0.0);
  Jet b = ramp_jet(1.0);
  CHECK(a.fp == 0.0);
  CHECK(a.fpp == 0.0);
  CHECK(b.fp == 0.0);
  CHECK(b.fpp == 0.0);
  Jet mid = ramp_jet(0.5);
  CHECK(mid.f == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mid.fp == doctest::Approx(2.25).epsilon(1e-15));  // peak slope 9/4
  // R'' positive strictly left of 1/2, negative strictly right
  CHECK(ramp_jet(0.25).fpp > 0.0);
  CHECK(ramp_jet(0.75).fpp < 0.0);
  // monotone increasing throughout
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    double v = ramp(i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("segment emitters assemble C2 splines with exact shapes") {
  // consecutive segments share the previous end jet, so the chain must be
  // jet-compatible: a plateau feeding a step down to zero
  std::vector<Knot> knots;
  emit_constant(knots, 0.0, 0.3, 2.25);
  emit_step(knots, 0.3, 0.6, 2.25, 0.0);
  ProfileFunction f = ProfileFunction::from_knots(knots);
  CHECK(f.value(0.1) == 2.25);
  CHECK(f.deriv(0.1) == 0.0);
  CHECK(f.value(0.45) == doctest::Approx(2.25 * (1.0 - ramp(0.5))).epsilon(1e-14));
  CHECK(f.value(0.6) == 0.0);
  CHECK(f.support_end() == 0.6);
}

TEST_CASE("parabola release matches cap and plateau jets") {
  std::vector<Knot> knots;
  emit_parabola(knots, 0.0, 0.6, 2.0);
  emit_parabola_release(knots, 0.6, 0.9, 2.0, 0.0);
  ProfileFunction f = ProfileFunction::from_knots(knots);
  // left end still on the parabola, right end exactly on the plateau
  CHECK(f.value(0.6) == doctest::Approx(2.0 * (1.0 - 0.36)).epsilon(1e-15));
  CHECK(f.value(0.9) == 0.0);
  CHECK(f.deriv(0.9) == 0.0);
  // monotone decreasing in between (K(1-r^2) > 0 on [0.6, 0.9])
  double prev = f.value(0.6);
  for (int i = 1; i <= 60; ++i) {
    double v = f.value(0.6 + 0.3 * i / 60.0);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}
