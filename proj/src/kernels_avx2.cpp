// AVX2/FMA variants. Compiled with -mavx2 -mfma; only dispatched to when the
// CPU reports AVX2 support.

#include <immintrin.h>

#include "attachlab/kernels.hpp"

namespace attachlab::kern::detail {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

static inline float hsum256(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 sh = _mm_movehl_ps(lo, lo);
  lo = _mm_add_ps(lo, sh);
  sh = _mm_shuffle_ps(lo, lo, 0x1);
  lo = _mm_add_ss(lo, sh);
  return _mm_cvtss_f32(lo);
}

float dot_avx2(const float* x, const float* y, std::size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i + 8), _mm256_loadu_ps(y + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
  }
  float acc = hsum256(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(float a, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void gemm_nt_avx2(const float* A, const float* B, float* C, std::size_t m, std::size_t n,
                  std::size_t k, const float* bias) {
  // Two A-rows at a time share each loaded B row.
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const float* a0 = A + i * k;
    const float* a1 = a0 + k;
    float* c0 = C + i * n;
    float* c1 = c0 + n;
    for (std::size_t j = 0; j < n; ++j) {
      const float* b = B + j * k;
      __m256 s0 = _mm256_setzero_ps();
      __m256 s1 = _mm256_setzero_ps();
      std::size_t p = 0;
      for (; p + 8 <= k; p += 8) {
        const __m256 vb = _mm256_loadu_ps(b + p);
        s0 = _mm256_fmadd_ps(_mm256_loadu_ps(a0 + p), vb, s0);
        s1 = _mm256_fmadd_ps(_mm256_loadu_ps(a1 + p), vb, s1);
      }
      float r0 = hsum256(s0);
      float r1 = hsum256(s1);
      for (; p < k; ++p) {
        r0 += a0[p] * b[p];
        r1 += a1[p] * b[p];
      }
      const float bj = bias ? bias[j] : 0.0f;
      c0[j] = bj + r0;
      c1[j] = bj + r1;
    }
  }
  for (; i < m; ++i) {
    const float* a = A + i * k;
    float* c = C + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = (bias ? bias[j] : 0.0f) + dot_avx2(a, B + j * k, k);
    }
  }
}

void gemm_nn_acc_avx2(const float* A, const float* B, float* C, std::size_t m, std::size_t l,
                      std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* a = A + i * l;
    float* c = C + i * n;
    for (std::size_t p = 0; p < l; ++p) axpy_avx2(a[p], B + p * n, c, n);
  }
}

void gemm_tn_acc_avx2(const float* A, const float* B, float* C, std::size_t l, std::size_t m,
                      std::size_t n) {
  for (std::size_t p = 0; p < l; ++p) {
    const float* a = A + p * m;
    const float* b = B + p * n;
    for (std::size_t i = 0; i < m; ++i) axpy_avx2(a[i], b, C + i * n, n);
  }
}

}  // namespace attachlab::kern::detail
