#include "pigan/simd.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#define PIGAN_X86 1
#include <immintrin.h>
#else
#define PIGAN_X86 0
#endif

namespace pigan::simd {

// ----------------------------------------------------------------------------
// Scalar reference kernels
// ----------------------------------------------------------------------------

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sq_dist_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void lrelu_scalar(const double* x, double* out, std::size_t n, double slope) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void lrelu_grad_scalar(const double* pre, const double* gout, double* gin,
                       std::size_t n, double slope) {
  for (std::size_t i = 0; i < n; ++i)
    gin[i] = gout[i] * (pre[i] > 0.0 ? 1.0 : slope);
}

void adam_step_scalar(double* p, double* m, double* v, const double* g,
                      std::size_t n, double lr, double b1, double b2,
                      double bc1, double bc2, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + eps);
  }
}

constexpr Kernels kScalarKernels{
    sum_scalar,   dot_scalar,          axpy_scalar,      sq_dist_scalar,
    lrelu_scalar, lrelu_grad_scalar,   adam_step_scalar,
};

// ----------------------------------------------------------------------------
// AVX2 + FMA kernels (4 doubles per lane)
// ----------------------------------------------------------------------------

#if PIGAN_X86

__attribute__((target("avx2,fma"))) double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

__attribute__((target("avx2,fma"))) double sum_avx2(const double* x,
                                                    std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double s = hsum256(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

__attribute__((target("avx2,fma"))) double dot_avx2(const double* x,
                                                    const double* y,
                                                    std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum256(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

__attribute__((target("avx2,fma"))) void axpy_avx2(double a, const double* x,
                                                   double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) double sq_dist_avx2(const double* x,
                                                        const double* y,
                                                        std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum256(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

__attribute__((target("avx2,fma"))) void lrelu_avx2(const double* x,
                                                    double* out, std::size_t n,
                                                    double slope) {
  const __m256d vslope = _mm256_set1_pd(slope);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d mask = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    __m256d scaled = _mm256_mul_pd(v, vslope);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(scaled, v, mask));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

__attribute__((target("avx2,fma"))) void lrelu_grad_avx2(const double* pre,
                                                         const double* gout,
                                                         double* gin,
                                                         std::size_t n,
                                                         double slope) {
  const __m256d vslope = _mm256_set1_pd(slope);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vpre = _mm256_loadu_pd(pre + i);
    __m256d mask = _mm256_cmp_pd(vpre, zero, _CMP_GT_OQ);
    __m256d factor = _mm256_blendv_pd(vslope, one, mask);
    _mm256_storeu_pd(gin + i, _mm256_mul_pd(_mm256_loadu_pd(gout + i), factor));
  }
  for (; i < n; ++i) gin[i] = gout[i] * (pre[i] > 0.0 ? 1.0 : slope);
}

__attribute__((target("avx2,fma"))) void adam_step_avx2(
    double* p, double* m, double* v, const double* g, std::size_t n, double lr,
    double b1, double b2, double bc1, double bc2, double eps) {
  const __m256d vb1 = _mm256_set1_pd(b1);
  const __m256d vb2 = _mm256_set1_pd(b2);
  const __m256d vomb1 = _mm256_set1_pd(1.0 - b1);
  const __m256d vomb2 = _mm256_set1_pd(1.0 - b2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d vbc1 = _mm256_set1_pd(bc1);
  const __m256d vbc2 = _mm256_set1_pd(bc2);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    vm = _mm256_fmadd_pd(vb1, vm, _mm256_mul_pd(vomb1, vg));
    vv = _mm256_fmadd_pd(vb2, vv, _mm256_mul_pd(vomb2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d denom =
        _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vv, vbc2)), veps);
    const __m256d step = _mm256_div_pd(
        _mm256_mul_pd(vlr, _mm256_mul_pd(vm, vbc1)), denom);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + eps);
  }
}

constexpr Kernels kAvx2Kernels{
    sum_avx2,   dot_avx2,        axpy_avx2,      sq_dist_avx2,
    lrelu_avx2, lrelu_grad_avx2, adam_step_avx2,
};

#endif  // PIGAN_X86

std::atomic<int> g_forced{-1};

Level pick_level() {
  if (const char* env = std::getenv("PIGAN_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Level::scalar;
    if (std::strcmp(env, "avx2") == 0) return Level::avx2;
  }
  return detect_level();
}

}  // namespace

Level detect_level() {
#if PIGAN_X86
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Level::avx2;
#endif
  return Level::scalar;
}

Level active_level() {
  int forced = g_forced.load(std::memory_order_acquire);
  if (forced >= 0) return static_cast<Level>(forced);
  static const Level detected = pick_level();
  return detected;
}

void force_level(Level level) {
#if !PIGAN_X86
  if (level == Level::avx2)
    throw std::runtime_error("avx2 kernels not available on this platform");
#else
  if (level == Level::avx2 && detect_level() != Level::avx2)
    throw std::runtime_error("avx2 not supported by this CPU");
#endif
  g_forced.store(static_cast<int>(level), std::memory_order_release);
}

const Kernels& kernels_for(Level level) {
#if PIGAN_X86
  if (level == Level::avx2) return kAvx2Kernels;
#else
  if (level == Level::avx2)
    throw std::runtime_error("avx2 kernels not available on this platform");
#endif
  return kScalarKernels;
}

const Kernels& active() { return kernels_for(active_level()); }

std::string to_string(Level level) {
  switch (level) {
    case Level::scalar: return "scalar";
    case Level::avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace pigan::simd
