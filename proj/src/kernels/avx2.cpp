#include "hamlab/kernels.hpp"

// AVX2 variants. This TU is the only one compiled with -mavx2; callers reach
// it through the dispatch table after a runtime CPU check. Arithmetic mirrors
// scalar.cpp lane-for-lane (explicit mul/add intrinsics, no FMA) so results
// are bit-identical to the reference path.

#if defined(__AVX2__)
#include <immintrin.h>

namespace hamlab::kern {
namespace {

MinMax minmax_avx2(const double* x, std::size_t n) {
  if (n < 8) return scalar_ops().minmax(x, n);
  __m256d lo = _mm256_loadu_pd(x);
  __m256d hi = lo;
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    lo = _mm256_min_pd(lo, v);
    hi = _mm256_max_pd(hi, v);
  }
  alignas(32) double a[4], b[4];
  _mm256_store_pd(a, lo);
  _mm256_store_pd(b, hi);
  double rlo = a[0], rhi = b[0];
  for (int k = 1; k < 4; ++k) {
    rlo = rlo < a[k] ? rlo : a[k];
    rhi = rhi > b[k] ? rhi : b[k];
  }
  for (; i < n; ++i) {
    rlo = rlo < x[i] ? rlo : x[i];
    rhi = rhi > x[i] ? rhi : x[i];
  }
  return {rlo, rhi};
}

void xor_rows_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t nwords) {
  std::size_t i = 0;
  for (; i + 4 <= nwords; i += 4) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(a, b));
  }
  for (; i < nwords; ++i) dst[i] ^= src[i];
}

void poly_eval_avx2(const double* coeff, const std::int32_t* idx, const double* u,
                    double* f, double* fp, double* fpp, std::size_t npts) {
  const __m256d k2 = _mm256_set1_pd(2.0), k3 = _mm256_set1_pd(3.0);
  const __m256d k4 = _mm256_set1_pd(4.0), k5 = _mm256_set1_pd(5.0);
  const __m256d k6 = _mm256_set1_pd(6.0), k12 = _mm256_set1_pd(12.0);
  const __m256d k20 = _mm256_set1_pd(20.0);
  std::size_t j = 0;
  for (; j + 4 <= npts; j += 4) {
    const __m128i base = _mm_mullo_epi32(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + j)), _mm_set1_epi32(6));
    const __m256d c0 = _mm256_i32gather_pd(coeff + 0, base, 8);
    const __m256d c1 = _mm256_i32gather_pd(coeff + 1, base, 8);
    const __m256d c2 = _mm256_i32gather_pd(coeff + 2, base, 8);
    const __m256d c3 = _mm256_i32gather_pd(coeff + 3, base, 8);
    const __m256d c4 = _mm256_i32gather_pd(coeff + 4, base, 8);
    const __m256d c5 = _mm256_i32gather_pd(coeff + 5, base, 8);
    const __m256d t = _mm256_loadu_pd(u + j);
    if (f) {
      __m256d v = c5;
      v = _mm256_add_pd(_mm256_mul_pd(v, t), c4);
      v = _mm256_add_pd(_mm256_mul_pd(v, t), c3);
      v = _mm256_add_pd(_mm256_mul_pd(v, t), c2);
      v = _mm256_add_pd(_mm256_mul_pd(v, t), c1);
      v = _mm256_add_pd(_mm256_mul_pd(v, t), c0);
      _mm256_storeu_pd(f + j, v);
    }
    if (fp) {
      __m256d v = _mm256_mul_pd(k5, c5);
      v = _mm256_add_pd(_mm256_mul_pd(v, t), _mm256_mul_pd(k4, c4));
      v = _mm256_add_pd(_mm256_mul_pd(v, t), _mm256_mul_pd(k3, c3));
      v = _mm256_add_pd(_mm256_mul_pd(v, t), _mm256_mul_pd(k2, c2));
      v = _mm256_add_pd(_mm256_mul_pd(v, t), c1);
      _mm256_storeu_pd(fp + j, v);
    }
    if (fpp) {
      __m256d v = _mm256_mul_pd(k20, c5);
      v = _mm256_add_pd(_mm256_mul_pd(v, t), _mm256_mul_pd(k12, c4));
      v = _mm256_add_pd(_mm256_mul_pd(v, t), _mm256_mul_pd(k6, c3));
      v = _mm256_add_pd(_mm256_mul_pd(v, t), _mm256_mul_pd(k2, c2));
      _mm256_storeu_pd(fpp + j, v);
    }
  }
  if (j < npts) {
    scalar_ops().poly_eval(coeff, idx + j, u + j, f ? f + j : nullptr,
                           fp ? fp + j : nullptr, fpp ? fpp + j : nullptr, npts - j);
  }
}

}  // namespace

const Ops* avx2_ops_or_null() {
  if (!cpu_has_avx2()) return nullptr;
  static const Ops ops{"avx2", minmax_avx2, xor_rows_avx2, poly_eval_avx2};
  return &ops;
}

}  // namespace hamlab::kern

#else  // compiler lacks AVX2 support entirely

namespace hamlab::kern {
const Ops* avx2_ops_or_null() { return nullptr; }
}  // namespace hamlab::kern

#endif
