#pragma once

#include <cstddef>
#include <string>

// Float inner-loop kernels for the LSTM. Scalar reference implementations
// plus AVX2 variants selected at runtime; both sides are equivalence-tested.
// Double-precision overloads are scalar only (used by the gradient checker).

namespace attachlab::kern {

enum class Impl { scalar, avx2 };

// Currently active float implementation.
Impl active();
const char* impl_name(Impl impl);

// Force an implementation (tests; also honoured from env ATTACHLAB_KERNELS).
// Requesting avx2 on a machine without it throws.
void force(Impl impl);

// Re-run detection (env override, CPU probe).
void reset();

float dot(const float* x, const float* y, std::size_t n);
void axpy(float a, const float* x, float* y, std::size_t n);

// C[i,j] = bias[j] + sum_k A[i,k] * B[j,k].
// A is m x k, B is n x k, C is m x n, all row-major. bias may be null.
void gemm_nt(const float* A, const float* B, float* C, std::size_t m, std::size_t n,
             std::size_t k, const float* bias);

// C[i,j] += sum_l A[i,l] * B[l,j].  A: m x l, B: l x n, C: m x n.
void gemm_nn_acc(const float* A, const float* B, float* C, std::size_t m, std::size_t l,
                 std::size_t n);

// C[i,j] += sum_l A[l,i] * B[l,j].  A: l x m, B: l x n, C: m x n.
void gemm_tn_acc(const float* A, const float* B, float* C, std::size_t l, std::size_t m,
                 std::size_t n);

// Scalar double overloads.
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void gemm_nt(const double* A, const double* B, double* C, std::size_t m, std::size_t n,
             std::size_t k, const double* bias);
void gemm_nn_acc(const double* A, const double* B, double* C, std::size_t m, std::size_t l,
                 std::size_t n);
void gemm_tn_acc(const double* A, const double* B, double* C, std::size_t l, std::size_t m,
                 std::size_t n);

namespace detail {
float dot_scalar(const float* x, const float* y, std::size_t n);
void axpy_scalar(float a, const float* x, float* y, std::size_t n);
void gemm_nt_scalar(const float* A, const float* B, float* C, std::size_t m, std::size_t n,
                    std::size_t k, const float* bias);
void gemm_nn_acc_scalar(const float* A, const float* B, float* C, std::size_t m, std::size_t l,
                        std::size_t n);
void gemm_tn_acc_scalar(const float* A, const float* B, float* C, std::size_t l, std::size_t m,
                        std::size_t n);

bool avx2_available();
float dot_avx2(const float* x, const float* y, std::size_t n);
void axpy_avx2(float a, const float* x, float* y, std::size_t n);
void gemm_nt_avx2(const float* A, const float* B, float* C, std::size_t m, std::size_t n,
                  std::size_t k, const float* bias);
void gemm_nn_acc_avx2(const float* A, const float* B, float* C, std::size_t m, std::size_t l,
                      std::size_t n);
void gemm_tn_acc_avx2(const float* A, const float* B, float* C, std::size_t l, std::size_t m,
                      std::size_t n);
}  // namespace detail

}  // namespace attachlab::kern
