#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "hamlab/gf2.hpp"

using namespace hamlab;

TEST_CASE("composition laws on random matrices") {
  GF2Space A{5}, B{7}, C{3}, D{4};
  GF2Map f = GF2Map::random_map(A, B, 42, 0);
  GF2Map g = GF2Map::random_map(B, C, 42, 1);
  GF2Map h = GF2Map::random_map(C, D, 42, 2);
  CHECK(compose(h, compose(g, f)) == compose(compose(h, g), f));
  CHECK(compose(g, GF2Map::identity(B)) == g);
  CHECK(compose(GF2Map::identity(C), g) == g);
  CHECK(compose(g, GF2Map::zero(A, B)).is_zero());
  CHECK_THROWS(compose(f, g));  // shapes do not chain

  // deterministic in (seed, stream)
  CHECK(GF2Map::random_map(A, B, 42, 0) == f);
  CHECK_FALSE(GF2Map::random_map(A, B, 42, 3) == f);
}

TEST_CASE("identity, zero, and the empty square") {
  GF2Space A{5};
  CHECK(GF2Map::identity(A).is_iso());
  CHECK(GF2Map::identity(A).rank() == 5);
  CHECK_FALSE(GF2Map::zero(A, A).is_iso());
  CHECK(GF2Map::zero(A, A).is_zero());
  // the map between two zero spaces is square and full rank by convention
  CHECK(GF2Map::zero(GF2Space{0}, GF2Space{0}).is_iso());
}

TEST_CASE("rank of a known singular matrix") {
  // rows (1,1,0), (0,1,1), (1,0,1): the third is the sum of the first two
  GF2Map m(GF2Space{3}, GF2Space{3});
  m.set(0, 0, true);
  m.set(0, 1, true);
  m.set(1, 1, true);
  m.set(1, 2, true);
  m.set(2, 0, true);
  m.set(2, 2, true);
  CHECK(m.rank() == 2);
  CHECK_FALSE(m.is_iso());
  CHECK(m.get(0, 0));
  CHECK_FALSE(m.get(0, 2));
}

TEST_CASE("rank respects composition with isomorphisms") {
  GF2Map big = GF2Map::random_map(GF2Space{70}, GF2Space{70}, 7, 3);
  const int r = big.rank();
  CHECK(r > 0);
  CHECK(compose(big, GF2Map::identity(GF2Space{70})).rank() == r);
  CHECK(compose(GF2Map::identity(GF2Space{70}), big).rank() == r);
}

namespace {

// dims [1, 1, 2]: an isomorphism at the front, then the projection killing
// the second basis vector of the dim-2 space
BidirectedSystem sample_chain() {
  BidirectedSystem sys;
  sys.grid = {0.0, 1.0, 2.0};
  sys.spaces = {GF2Space{1}, GF2Space{1}, GF2Space{2}};
  GF2Map proj(GF2Space{2}, GF2Space{1});
  proj.set(0, 0, true);
  sys.maps = {GF2Map::identity(GF2Space{1}), proj};
  sys.iso = {true, false};
  return sys;
}

}  // namespace

TEST_CASE("direct and inverse limits of a finite chain") {
  BidirectedSystem sys = sample_chain();
  CHECK_NOTHROW(sys.validate());

  LimitResult dl = direct_limit(sys, {0, 1, 2});
  CHECK(dl.space.dimension == 1);
  CHECK(dl.anchor == 0);
  REQUIRE(dl.canonical.size() == 3);
  CHECK(dl.canonical[2].rank() == 1);
  CHECK(dl.canonical_iso[0]);
  CHECK(dl.canonical_iso[1]);
  CHECK_FALSE(dl.canonical_iso[2]);

  LimitResult il = inverse_limit(sys, {0, 1, 2});
  CHECK(il.space.dimension == 2);
  CHECK(il.anchor == 2);
  CHECK(il.canonical[0].rank() == 1);
  CHECK_FALSE(il.canonical_iso[0]);
}

TEST_CASE("an exhausting tail of isomorphisms realizes the limit exactly") {
  BidirectedSystem sys = sample_chain();
  LimitResult tail = direct_limit(sys, {0, 1});
  CHECK(tail.space.dimension == 1);
  CHECK(tail.canonical_iso[0]);
  CHECK(tail.canonical_iso[1]);
}

TEST_CASE("constant chains recover the space with identity maps") {
  BidirectedSystem cst;
  cst.grid = {-1.0, 0.0, 1.0, 2.0};
  for (int i = 0; i < 4; ++i) cst.spaces.push_back(GF2Space{4});
  for (int i = 0; i < 3; ++i) {
    cst.maps.push_back(GF2Map::identity(GF2Space{4}));
    cst.iso.push_back(true);
  }
  cst.validate();
  LimitResult cd = direct_limit(cst, {0, 1, 2, 3});
  LimitResult ci = inverse_limit(cst, {1, 3});
  CHECK(cd.space.dimension == 4);
  CHECK(ci.space.dimension == 4);
  for (bool b : cd.canonical_iso) CHECK(b);
  for (bool b : ci.canonical_iso) CHECK(b);
  CHECK(cd.canonical[3].is_iso());
}

TEST_CASE("composite transitions and the trivial path") {
  BidirectedSystem sys = sample_chain();
  CHECK(composite_toward_front(sys, 2, 2) == GF2Map::identity(GF2Space{2}));
  GF2Map full = composite_toward_front(sys, 2, 0);
  CHECK(full.source().dimension == 2);
  CHECK(full.target().dimension == 1);
  CHECK(full.rank() == 1);
}

TEST_CASE("validation rejects inconsistent audit flags and shapes") {
  BidirectedSystem bad = sample_chain();
  bad.iso[1] = true;  // the projection is not an isomorphism
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  BidirectedSystem shapes = sample_chain();
  shapes.spaces[1] = GF2Space{3};  // no longer matches the maps
  CHECK_THROWS_AS(shapes.validate(), std::invalid_argument);

  BidirectedSystem grid = sample_chain();
  grid.grid = {0.0, 2.0, 1.0};  // not increasing
  CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
}
