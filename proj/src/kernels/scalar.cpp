#include "hamlab/kernels.hpp"

// Reference kernels. The AVX2 variants replicate this arithmetic lane-wise;
// keep operation order in sync with avx2.cpp when editing.

namespace hamlab::kern {
namespace {

MinMax minmax_scalar(const double* x, std::size_t n) {
  // Selection rule matches x86 minpd/maxpd: keep the accumulator on ties.
  double lo = x[0], hi = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    lo = lo < x[i] ? lo : x[i];
    hi = hi > x[i] ? hi : x[i];
  }
  return {lo, hi};
}

void xor_rows_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t nwords) {
  for (std::size_t i = 0; i < nwords; ++i) dst[i] ^= src[i];
}

void poly_eval_scalar(const double* coeff, const std::int32_t* idx, const double* u,
                      double* f, double* fp, double* fpp, std::size_t npts) {
  for (std::size_t j = 0; j < npts; ++j) {
    const double* c = coeff + 6 * static_cast<std::size_t>(idx[j]);
    const double t = u[j];
    if (f) {
      double v = c[5];
      v = v * t + c[4];
      v = v * t + c[3];
      v = v * t + c[2];
      v = v * t + c[1];
      v = v * t + c[0];
      f[j] = v;
    }
    if (fp) {
      double v = 5.0 * c[5];
      v = v * t + 4.0 * c[4];
      v = v * t + 3.0 * c[3];
      v = v * t + 2.0 * c[2];
      v = v * t + c[1];
      fp[j] = v;
    }
    if (fpp) {
      double v = 20.0 * c[5];
      v = v * t + 12.0 * c[4];
      v = v * t + 6.0 * c[3];
      v = v * t + 2.0 * c[2];
      fpp[j] = v;
    }
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", minmax_scalar, xor_rows_scalar, poly_eval_scalar};
  return ops;
}

}  // namespace hamlab::kern
