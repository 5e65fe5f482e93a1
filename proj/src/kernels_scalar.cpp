#include "attachlab/kernels.hpp"

namespace attachlab::kern {

namespace detail {

float dot_scalar(const float* x, const float* y, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(float a, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemm_nt_scalar(const float* A, const float* B, float* C, std::size_t m, std::size_t n,
                    std::size_t k, const float* bias) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* a = A + i * k;
    float* c = C + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      float acc = bias ? bias[j] : 0.0f;
      const float* b = B + j * k;
      for (std::size_t p = 0; p < k; ++p) acc += a[p] * b[p];
      c[j] = acc;
    }
  }
}

void gemm_nn_acc_scalar(const float* A, const float* B, float* C, std::size_t m, std::size_t l,
                        std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    float* c = C + i * n;
    const float* a = A + i * l;
    for (std::size_t p = 0; p < l; ++p) {
      const float av = a[p];
      const float* b = B + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

void gemm_tn_acc_scalar(const float* A, const float* B, float* C, std::size_t l, std::size_t m,
                        std::size_t n) {
  for (std::size_t p = 0; p < l; ++p) {
    const float* a = A + p * m;
    const float* b = B + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const float av = a[i];
      float* c = C + i * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

}  // namespace detail

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemm_nt(const double* A, const double* B, double* C, std::size_t m, std::size_t n,
             std::size_t k, const double* bias) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    double* c = C + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      double acc = bias ? bias[j] : 0.0;
      c[j] = acc + dot(a, B + j * k, k);
    }
  }
}

void gemm_nn_acc(const double* A, const double* B, double* C, std::size_t m, std::size_t l,
                 std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < l; ++p) axpy(A[i * l + p], B + p * n, C + i * n, n);
  }
}

void gemm_tn_acc(const double* A, const double* B, double* C, std::size_t l, std::size_t m,
                 std::size_t n) {
  for (std::size_t p = 0; p < l; ++p) {
    for (std::size_t i = 0; i < m; ++i) axpy(A[p * m + i], B + p * n, C + i * n, n);
  }
}

}  // namespace attachlab::kern
