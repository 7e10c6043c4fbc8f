#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "hamlab/families.hpp"
#include "hamlab/field.hpp"

using namespace hamlab;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("zero field vanishes identically") {
  HamiltonianField h = zero_field(2);
  CHECK(h.dim() == 2);
  CHECK(h.momentum_only());
  double q[2] = {0.3, -0.7}, p[2] = {0.1, 0.2}, g[2];
  CHECK(h.value(0.4, q, p) == 0.0);
  h.grad_q(0.4, q, p, g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  h.grad_p(0.4, q, p, g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(h.zero_section_infimum() == 0.0);
}

TEST_CASE("momentum hamiltonian matches the radial profile exactly") {
  // f = 2 (1 - r^2) inside the cut, so dH/dp = -4 p exactly there
  HamiltonianField h = make_momentum_hamiltonian(2, cut_parabola(2.0));
  CHECK(h.dim() == 2);
  CHECK(h.momentum_only());
  CHECK(h.analytic_partials());
  REQUIRE(h.profile() != nullptr);
  CHECK(h.profile()->value(0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(h.zero_section_infimum() == doctest::Approx(2.0).epsilon(1e-12));

  double q[2] = {0.2, 0.9};
  double p[2] = {0.3, -0.2};
  const double r = std::hypot(p[0], p[1]);
  CHECK(h.value(0.0, q, p) == doctest::Approx(2.0 * (1.0 - r * r)).epsilon(1e-14));
  double g[2];
  h.grad_q(0.0, q, p, g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  h.grad_p(0.0, q, p, g);
  CHECK(g[0] == doctest::Approx(-4.0 * p[0]).epsilon(1e-13));
  CHECK(g[1] == doctest::Approx(-4.0 * p[1]).epsilon(1e-13));

  // cap limit: the gradient vanishes with p, no 0/0 blowup
  double zero[2] = {0.0, 0.0};
  h.grad_p(0.0, q, zero, g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);

  // rhs packs (dH/dp, -dH/dq) over the flat state
  double x[4] = {q[0], q[1], p[0], p[1]}, dx[4];
  h.rhs(0.0, x, dx);
  CHECK(dx[0] == doctest::Approx(-4.0 * p[0]).epsilon(1e-13));
  CHECK(dx[1] == doctest::Approx(-4.0 * p[1]).epsilon(1e-13));
  CHECK(dx[2] == 0.0);
  CHECK(dx[3] == 0.0);
}

TEST_CASE("cosine bump value on the momentum plateau") {
  const double amp = 0.3, phase = 0.25;
  HamiltonianField h = cosine_bump(2, {1, -2}, amp, phase);
  CHECK(h.dim() == 2);
  CHECK_FALSE(h.momentum_only());
  double q[2] = {0.15, 0.4};
  double p[2] = {0.2, 0.1};  // |p| < 0.55, window is exactly 1 here
  const double want = amp * std::cos(kTwoPi * (q[0] - 2.0 * q[1]) + phase);
  CHECK(h.value(0.7, q, p) == doctest::Approx(want).epsilon(1e-12));
  double g[2];
  h.grad_q(0.7, q, p, g);
  const double ds = -amp * kTwoPi * std::sin(kTwoPi * (q[0] - 2.0 * q[1]) + phase);
  CHECK(g[0] == doctest::Approx(ds * 1.0).epsilon(1e-11));
  CHECK(g[1] == doctest::Approx(ds * -2.0).epsilon(1e-11));

  // support dies past the window
  double far[2] = {0.95, 0.0};
  CHECK(h.value(0.7, q, far) == 0.0);
}

TEST_CASE("time wobble modulates the bump and breaks autonomy") {
  HamiltonianField h = cosine_bump(1, {1}, 0.5, 0.0, 0.25);
  CHECK(h.time_periodic());
  double q[1] = {0.1}, p[1] = {0.2};
  const double base = 0.5 * std::cos(kTwoPi * q[0]);
  CHECK(h.value(0.0, q, p) == doctest::Approx(base * 1.25).epsilon(1e-12));
  CHECK(h.value(0.5, q, p) == doctest::Approx(base * 0.75).epsilon(1e-12));

  // zero wave with no wobble degenerates to a pure momentum window
  HamiltonianField flat = cosine_bump(1, {0}, 0.5, 0.0, 0.0);
  CHECK(flat.momentum_only());
}

TEST_CASE("sum field adds values and gradients pointwise") {
  HamiltonianField a = make_momentum_hamiltonian(2, cut_parabola(2.0));
  HamiltonianField b = cosine_bump(2, {1, 0}, 0.3, 0.0);
  HamiltonianField s = sum_field(a, b);
  double q[2] = {0.37, 0.81}, p[2] = {0.25, -0.05};
  CHECK(s.value(0.3, q, p) ==
        doctest::Approx(a.value(0.3, q, p) + b.value(0.3, q, p)).epsilon(1e-13));
  double ga[2], gb[2], gs[2];
  s.grad_q(0.3, q, p, gs);
  a.grad_q(0.3, q, p, ga);
  b.grad_q(0.3, q, p, gb);
  CHECK(gs[0] == doctest::Approx(ga[0] + gb[0]).epsilon(1e-12));
  CHECK(gs[1] == doctest::Approx(ga[1] + gb[1]).epsilon(1e-12));
  // infimum over the zero section: profile head plus the bump trough
  CHECK(s.zero_section_infimum() == doctest::Approx(1.7).epsilon(1e-3));
}

TEST_CASE("iterate compresses time and scales the generator") {
  HamiltonianField base = cosine_bump(1, {1}, 0.4, 0.1, 0.3);
  HamiltonianField it = iterate_hamiltonian(base, 3);
  double q[1] = {0.2}, p[1] = {0.3};
  // 3 t = 2.1 wraps to 0.1
  CHECK(it.value(0.7, q, p) ==
        doctest::Approx(3.0 * base.value(0.1, q, p)).epsilon(1e-12));
  CHECK(it.time_periodic());

  // autonomous base: plain scaling
  HamiltonianField prof = make_momentum_hamiltonian(1, cut_parabola(2.0));
  HamiltonianField it2 = iterate_hamiltonian(prof, 4);
  CHECK(it2.value(0.9, q, p) == doctest::Approx(4.0 * prof.value(0.0, q, p)).epsilon(1e-13));
  CHECK(it2.zero_section_infimum() == doctest::Approx(8.0).epsilon(1e-9));

  CHECK_THROWS(iterate_hamiltonian(base, 0));
  CHECK_THROWS(iterate_hamiltonian(base, -2));
}

TEST_CASE("composition of momentum-only factors is the plain sum") {
  HamiltonianField a = make_momentum_hamiltonian(1, cut_parabola(2.0));
  HamiltonianField b = make_momentum_hamiltonian(1, cut_parabola(1.5, 0.8, 0.9));
  HamiltonianField c = compose_product(a, b);
  CHECK(c.momentum_only());
  double q[1] = {0.6};
  for (double pv : {0.0, 0.2, 0.5, 0.85}) {
    double p[1] = {pv};
    CHECK(c.value(0.0, q, p) ==
          doctest::Approx(a.value(0.0, q, p) + b.value(0.0, q, p)).epsilon(1e-13));
  }
}

TEST_CASE("analytic partials agree with finite differences") {
  CHECK(max_partial_mismatch(make_momentum_hamiltonian(2, cut_parabola(2.0)), 7) < 1e-5);
  CHECK(max_partial_mismatch(cosine_bump(2, {1, -1}, 0.4, 0.3, 0.2), 7) < 1e-5);
  CHECK(max_partial_mismatch(
            sum_field(make_momentum_hamiltonian(2, cut_parabola(2.0)),
                      cosine_bump(2, {0, 1}, 0.2, 0.0)),
            7) < 1e-5);
}

TEST_CASE("constructor argument validation") {
  CHECK_THROWS(make_momentum_hamiltonian(0, cut_parabola(2.0)));
  CHECK_THROWS(cosine_bump(2, {1}, 0.3, 0.0));      // wave length != n
  CHECK_THROWS(cosine_bump(1, {1, 2}, 0.3, 0.0));   // wave length != n
  CHECK_THROWS(sum_field(make_momentum_hamiltonian(1, cut_parabola(2.0)),
                         make_momentum_hamiltonian(2, cut_parabola(2.0))));
}
