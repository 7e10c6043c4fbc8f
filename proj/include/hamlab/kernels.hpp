#pragma once
// Data-parallel inner loops with runtime ISA dispatch. Every operation has a
// scalar reference implementation and (on capable CPUs) an AVX2 variant that
// performs the same arithmetic in the same per-lane order, so outputs are
// bit-identical between paths (the build disables FP contraction globally).
// Inputs are assumed NaN-free; min/max follow the x86 minpd/maxpd selection
// rule (a<b ? a : b) in both implementations.

#include <cstddef>
#include <cstdint>

namespace hamlab::kern {

struct MinMax {
  double lo;
  double hi;
};

struct Ops {
  const char* name;

  // Running min/max of n doubles (n >= 1).
  MinMax (*minmax)(const double* x, std::size_t n);

  // dst[i] ^= src[i] for nwords 64-bit words (GF(2) row elimination core).
  void (*xor_rows)(std::uint64_t* dst, const std::uint64_t* src, std::size_t nwords);

  // Batched piecewise-polynomial evaluation. coeff holds 6 monomial
  // coefficients per piece (degree <= 5, local variable u measured from the
  // piece's left knot). idx[j] selects the piece for point j, u[j] is its
  // local coordinate. Writes value, first and second derivative arrays; any
  // of f/fp/fpp may be null to skip.
  void (*poly_eval)(const double* coeff, const std::int32_t* idx, const double* u,
                    double* f, double* fp, double* fpp, std::size_t npts);
};

// Active implementation, chosen once at first use.
const Ops& ops();

// Reference path, always available.
const Ops& scalar_ops();

// AVX2 path, or nullptr when the CPU lacks AVX2.
const Ops* avx2_ops_or_null();

bool cpu_has_avx2();

}  // namespace hamlab::kern
