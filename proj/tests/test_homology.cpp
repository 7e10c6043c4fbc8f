#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hamlab/homology.hpp"

using namespace hamlab;

namespace {
const OrbitCase kT2{false, 2};  // torus families, n = 2
const OrbitCase kN{true, 2};    // circle families
}  // namespace

TEST_CASE("case labels and betti numbers") {
  CHECK(kT2.label() == "T2");
  CHECK(kN.label() == "N");
  CHECK(kT2.family_betti() == 4);
  CHECK(kT2.zero_section_betti() == 4);
  CHECK(kN.family_betti() == 2);
}

TEST_CASE("spot rows of the rank tables") {
  SHTableRow r = compute_SH_tables(kT2, OrbitClassKind::zero, 0.5, 1.0, 0.0);
  CHECK(r.inverse_rank == 4);
  CHECK(r.direct_rank == 4);
  CHECK(r.t_iso);

  r = compute_SH_tables(kT2, OrbitClassKind::nonzero, 0.5, 1.0, 1.0);
  CHECK(r.inverse_rank == 0);  // window edge below the class slope
  CHECK(r.direct_rank == 4);
  CHECK_FALSE(r.t_iso);

  r = compute_SH_tables(kN, OrbitClassKind::nonzero, 1.2, 2.0, 1.0);
  CHECK(r.inverse_rank == 2);
  CHECK(r.direct_rank == 2);
  CHECK(r.t_iso);

  r = compute_SH_tables(kT2, OrbitClassKind::nonzero, 0.7, 0.5, 1.0);
  CHECK(r.inverse_rank == 0);
  CHECK(r.direct_rank == 0);
  CHECK_FALSE(r.t_iso);
}

TEST_CASE("qualitative table over the (a, c) grid") {
  const double as[] = {0.3, 0.7, 1.0, 1.6, 2.2};
  const double cs[] = {0.5, 0.9, 1.3, 1.7, 2.4};
  const double ell = 1.0;
  for (double a : as)
    for (double c : cs) {
      SHTableRow z = compute_SH_tables(kT2, OrbitClassKind::zero, a, c, 0.0);
      CHECK(z.inverse_rank == 4);
      CHECK(z.direct_rank == (a <= c ? 4 : 0));
      CHECK(z.t_iso == (a <= c));

      SHTableRow nz = compute_SH_tables(kT2, OrbitClassKind::nonzero, a, c, ell);
      CHECK(nz.inverse_rank == (a >= ell ? 4 : 0));
      CHECK(nz.direct_rank == (a <= c ? 4 : 0));
      CHECK(nz.t_iso == (ell <= a && a <= c));

      SHTableRow cn = compute_SH_tables(kN, OrbitClassKind::nonzero, a, c, ell);
      CHECK(cn.inverse_rank == (a >= ell ? 2 : 0));
      CHECK(cn.direct_rank == (a <= c ? 2 : 0));
      CHECK(cn.t_iso == (ell <= a && a <= c));
    }
}

TEST_CASE("interval capacity closed form") {
  const double as[] = {0.3, 0.7, 1.0, 1.6, 2.2};
  for (double a : as) {
    CHECK(capacity_hat(kT2, OrbitClassKind::zero, a, 0.0) == std::max(0.0, a));
    CHECK(capacity_hat(kT2, OrbitClassKind::nonzero, a, 1.0) == std::max(1.0, a));
  }
  CHECK(capacity_hat(kT2, OrbitClassKind::nonzero, 2.0, 5.0) == 5.0);
  CHECK(capacity_hat(kT2, OrbitClassKind::zero, -3.0, 0.0) == 0.0);
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(capacity_hat(kT2, OrbitClassKind::zero, ninf, 0.0) == 0.0);
  CHECK(capacity_hat(kN, OrbitClassKind::nonzero, ninf, 2.0) == 2.0);
}

TEST_CASE("bisection scan agrees with the closed form") {
  CHECK(std::fabs(capacity_hat_scan(kT2, OrbitClassKind::zero, 0.5, 0.0) - 0.5) <= 2e-6);
  CHECK(std::fabs(capacity_hat_scan(kT2, OrbitClassKind::nonzero, 0.3, 1.0) - 1.0) <= 2e-6);
  CHECK(std::fabs(capacity_hat_scan(kT2, OrbitClassKind::nonzero, 2.2, 1.0) - 2.2) <= 2e-6);
  CHECK(std::fabs(capacity_hat_scan(kN, OrbitClassKind::nonzero, 2.0, 5.0) - 5.0) <= 2e-6);
}

TEST_CASE("critical data of a nonzero-class member") {
  FamilyMember m = build_profile_family(FamilyKind::nonzero_class, -1.0, 2.0, 1.0);
  auto data = critical_data(m, OrbitClassKind::nonzero, kT2);
  REQUIRE(data.size() == 2);
  CHECK(data[0].radius < data[1].radius);
  CHECK(data[0].action > data[1].action);  // inner orbit carries more action
  CHECK(data[0].betti_total == 4);
  CHECK(data[1].betti_total == 4);

  // circle case swaps the family betti number
  auto circles = critical_data(m, OrbitClassKind::nonzero, kN);
  REQUIRE(circles.size() == 2);
  CHECK(circles[0].betti_total == 2);

  // a zero-section member does not carry the nonzero class
  FamilyMember z = build_profile_family(FamilyKind::zero_section, 0.0, 1.0);
  CHECK_THROWS_AS(critical_data(z, OrbitClassKind::nonzero, kT2),
                  std::invalid_argument);
}

TEST_CASE("isolated-manifold rank rule") {
  FamilyMember m = build_profile_family(FamilyKind::nonzero_class, -1.0, 2.0, 1.0);
  auto data = critical_data(m, OrbitClassKind::nonzero, kT2);
  REQUIRE(data.size() == 2);

  FilteredRank fr = filtered_rank(data, 0.5 * (data[0].action + data[1].action));
  CHECK(fr.determinate);
  CHECK(fr.rank == 4);  // only the high-action manifold is in the window

  fr = filtered_rank(data, data[1].action - 1.0);
  CHECK_FALSE(fr.determinate);  // both inside, list alone cannot decide

  fr = filtered_rank(data, data[0].action + 1.0);
  CHECK(fr.determinate);
  CHECK(fr.rank == 0);  // empty window

  fr = filtered_rank({}, 1.0);
  CHECK(fr.determinate);
  CHECK(fr.rank == 0);
}

TEST_CASE("table builder and case validation") {
  CHECK_THROWS_AS(compute_SH_tables(kT2, OrbitClassKind::zero, -1.0, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_SH_tables(kT2, OrbitClassKind::zero, 1.0, -1.0, 0.0),
                  std::invalid_argument);
  // the circle case has no contractible-class tables
  CHECK_THROWS_AS(compute_SH_tables(kN, OrbitClassKind::zero, 1.0, 1.0, 0.0),
                  std::invalid_argument);
  // zero class must come with ell = 0
  CHECK_THROWS_AS(compute_SH_tables(kT2, OrbitClassKind::zero, 1.0, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("table CSV header and row shape") {
  SHTableRow r = compute_SH_tables(kT2, OrbitClassKind::zero, 0.5, 1.0, 0.0);
  std::ostringstream os;
  write_sh_table_csv(os, {r});
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "case,class,a,c,ell,inverse_rank,direct_rank,T_iso");
  REQUIRE(std::getline(is, line));
  CHECK(line.substr(0, 8) == "T2,zero,");
  CHECK_FALSE(std::getline(is, line));
}
