#pragma once

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace ibmi::detail {

// Smooth kernels have Cholesky factors and inverses whose entries decay
// below DBL_MIN, and x86 arithmetic on subnormals runs ~4x slower inside the
// triangular solves. This flushes them to zero (FTZ + DAZ) for the lifetime of
// the guard and restores the caller's mode afterwards.
class FlushSubnormals {
 public:
#if defined(__SSE2__)
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }
#else
  FlushSubnormals() = default;
#endif
  FlushSubnormals(const FlushSubnormals&) = delete;
  FlushSubnormals& operator=(const FlushSubnormals&) = delete;

 private:
#if defined(__SSE2__)
  unsigned saved_;
#endif
};

}  // namespace ibmi::detail
