#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "hamlab/kernels.hpp"
#include "hamlab/rng.hpp"

using namespace hamlab;

// The SIMD path must be bit-identical to the scalar reference, not merely
// close: the lab's determinism story depends on outputs not changing with the
// host CPU. NaNs are excluded by contract, so the tests avoid them too.

namespace {

std::vector<double> random_doubles(std::size_t n, std::uint64_t stream) {
  CounterRng rng{77, stream};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = rng.uniform(i, -40.0, 40.0);
  return out;
}

}  // namespace

TEST_CASE("minmax matches scalar reference bit for bit") {
  const kern::Ops& ref = kern::scalar_ops();
  const kern::Ops* simd = kern::avx2_ops_or_null();
  // odd lengths exercise the tail handling in the vector path
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 64u, 257u, 1000u}) {
    auto x = random_doubles(n, n);
    kern::MinMax a = ref.minmax(x.data(), n);
    double lo = x[0], hi = x[0];
    for (double v : x) {
      lo = v < lo ? v : lo;
      hi = hi < v ? v : hi;
    }
    CHECK(a.lo == lo);
    CHECK(a.hi == hi);
    if (simd) {
      kern::MinMax b = simd->minmax(x.data(), n);
      CHECK(a.lo == b.lo);
      CHECK(a.hi == b.hi);
    }
  }
}

TEST_CASE("minmax handles signed zero like minpd/maxpd") {
  // the contract pins the x86 selection rule a<b ? a : b, so -0.0 and 0.0
  // are interchangeable and must not crash or reorder
  std::vector<double> x = {0.0, -0.0, 1.0, -1.0};
  kern::MinMax a = kern::scalar_ops().minmax(x.data(), x.size());
  CHECK(a.lo == -1.0);
  CHECK(a.hi == 1.0);
  if (const kern::Ops* simd = kern::avx2_ops_or_null()) {
    kern::MinMax b = simd->minmax(x.data(), x.size());
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
}

TEST_CASE("xor_rows equals scalar reference") {
  const kern::Ops& ref = kern::scalar_ops();
  const kern::Ops* simd = kern::avx2_ops_or_null();
  CounterRng rng{13, 5};
  for (std::size_t nwords : {1u, 2u, 3u, 4u, 6u, 9u, 33u}) {
    std::vector<std::uint64_t> src(nwords), a(nwords), b(nwords);
    for (std::size_t i = 0; i < nwords; ++i) {
      src[i] = rng.bits(2 * i);
      a[i] = rng.bits(2 * i + 1);
    }
    b = a;
    ref.xor_rows(a.data(), src.data(), nwords);
    for (std::size_t i = 0; i < nwords; ++i)
      CHECK(a[i] == (b[i] ^ src[i]));
    if (simd) {
      simd->xor_rows(b.data(), src.data(), nwords);
      CHECK(a == b);
    }
  }
}

TEST_CASE("xor_rows twice restores the destination") {
  std::vector<std::uint64_t> src = {0xdeadbeefcafef00dull, 0x0123456789abcdefull};
  std::vector<std::uint64_t> dst = {42, 7};
  auto orig = dst;
  kern::ops().xor_rows(dst.data(), src.data(), 2);
  kern::ops().xor_rows(dst.data(), src.data(), 2);
  CHECK(dst == orig);
}

TEST_CASE("poly_eval matches scalar reference and Horner oracle") {
  const kern::Ops& ref = kern::scalar_ops();
  const kern::Ops* simd = kern::avx2_ops_or_null();

  // two quintic pieces with coefficients of mixed sign and size
  std::vector<double> coeff = {
      1.0, -2.0, 0.5,  3.0, -0.25, 0.125,   // piece 0
      -4.0, 1.0, -1.5, 0.0, 2.0,   -0.5,    // piece 1
  };
  const std::size_t npts = 37;  // odd, exercises the vector tail
  std::vector<std::int32_t> idx(npts);
  std::vector<double> u(npts);
  CounterRng rng{99, 1};
  for (std::size_t j = 0; j < npts; ++j) {
    idx[j] = static_cast<std::int32_t>(rng.pick(3 * j, 2));
    u[j] = rng.uniform(3 * j + 1, 0.0, 0.8);
  }

  std::vector<double> f(npts), fp(npts), fpp(npts);
  ref.poly_eval(coeff.data(), idx.data(), u.data(), f.data(), fp.data(),
                fpp.data(), npts);

  for (std::size_t j = 0; j < npts; ++j) {
    const double* c = coeff.data() + 6 * idx[j];
    double x = u[j];
    double v = ((((c[5] * x + c[4]) * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
    double d = (((5 * c[5] * x + 4 * c[4]) * x + 3 * c[3]) * x + 2 * c[2]) * x + c[1];
    double d2 = ((20 * c[5] * x + 12 * c[4]) * x + 6 * c[3]) * x + 2 * c[2];
    CHECK(f[j] == doctest::Approx(v).epsilon(1e-14));
    CHECK(fp[j] == doctest::Approx(d).epsilon(1e-13));
    CHECK(fpp[j] == doctest::Approx(d2).epsilon(1e-13));
  }

  if (simd) {
    std::vector<double> f2(npts), fp2(npts), fpp2(npts);
    simd->poly_eval(coeff.data(), idx.data(), u.data(), f2.data(), fp2.data(),
                    fpp2.data(), npts);
    CHECK(std::memcmp(f.data(), f2.data(), npts * sizeof(double)) == 0);
    CHECK(std::memcmp(fp.data(), fp2.data(), npts * sizeof(double)) == 0);
    CHECK(std::memcmp(fpp.data(), fpp2.data(), npts * sizeof(double)) == 0);
  }
}

TEST_CASE("poly_eval accepts null output slots") {
  std::vector<double> coeff(6, 1.0);
  std::int32_t idx = 0;
  double u = 0.5;
  double f = 0.0;
  kern::ops().poly_eval(coeff.data(), &idx, &u, &f, nullptr, nullptr, 1);
  // 1 + u + ... + u^5 at u = 1/2, geometric tail
  CHECK(f == doctest::Approx((1.0 - std::pow(0.5, 6)) / 0.5).epsilon(1e-15));
}

TEST_CASE("dispatch reports a coherent configuration") {
  const kern::Ops& active = kern::ops();
  CHECK(active.name != nullptr);
  if (kern::cpu_has_avx2()) {
    REQUIRE(kern::avx2_ops_or_null() != nullptr);
    CHECK(std::strcmp(active.name, kern::avx2_ops_or_null()->name) == 0);
  } else {
    CHECK(kern::avx2_ops_or_null() == nullptr);
    CHECK(std::strcmp(active.name, kern::scalar_ops().name) == 0);
  }
}
