#include "hamlab/kernels.hpp"

namespace hamlab::kern {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Ops& ops() {
  static const Ops& chosen = []() -> const Ops& {
    if (const Ops* a = avx2_ops_or_null()) return *a;
    return scalar_ops();
  }();
  return chosen;
}

}  // namespace hamlab::kern
