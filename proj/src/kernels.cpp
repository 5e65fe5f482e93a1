#include "attachlab/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace attachlab::kern {

namespace {

struct Table {
  float (*dot)(const float*, const float*, std::size_t);
  void (*axpy)(float, const float*, float*, std::size_t);
  void (*gemm_nt)(const float*, const float*, float*, std::size_t, std::size_t, std::size_t,
                  const float*);
  void (*gemm_nn_acc)(const float*, const float*, float*, std::size_t, std::size_t, std::size_t);
  void (*gemm_tn_acc)(const float*, const float*, float*, std::size_t, std::size_t, std::size_t);
};

constexpr Table kScalar = {detail::dot_scalar, detail::axpy_scalar, detail::gemm_nt_scalar,
                           detail::gemm_nn_acc_scalar, detail::gemm_tn_acc_scalar};
constexpr Table kAvx2 = {detail::dot_avx2, detail::axpy_avx2, detail::gemm_nt_avx2,
                         detail::gemm_nn_acc_avx2, detail::gemm_tn_acc_avx2};

Impl g_impl = Impl::scalar;
const Table* g_table = &kScalar;
bool g_initialized = false;

void select(Impl impl) {
  if (impl == Impl::avx2 && !detail::avx2_available()) {
    throw std::runtime_error("AVX2 kernels requested but CPU lacks AVX2/FMA");
  }
  g_impl = impl;
  g_table = impl == Impl::avx2 ? &kAvx2 : &kScalar;
  g_initialized = true;
}

void init() {
  if (g_initialized) return;
  const char* env = std::getenv("ATTACHLAB_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) {
    select(Impl::scalar);
  } else if (env && std::strcmp(env, "avx2") == 0) {
    select(Impl::avx2);
  } else {
    select(detail::avx2_available() ? Impl::avx2 : Impl::scalar);
  }
}

}  // namespace

Impl active() {
  init();
  return g_impl;
}

const char* impl_name(Impl impl) { return impl == Impl::avx2 ? "avx2" : "scalar"; }

void force(Impl impl) { select(impl); }

void reset() {
  g_initialized = false;
  init();
}

float dot(const float* x, const float* y, std::size_t n) {
  init();
  return g_table->dot(x, y, n);
}

void axpy(float a, const float* x, float* y, std::size_t n) {
  init();
  g_table->axpy(a, x, y, n);
}

void gemm_nt(const float* A, const float* B, float* C, std::size_t m, std::size_t n, std::size_t k,
             const float* bias) {
  init();
  g_table->gemm_nt(A, B, C, m, n, k, bias);
}

void gemm_nn_acc(const float* A, const float* B, float* C, std::size_t m, std::size_t l,
                 std::size_t n) {
  init();
  g_table->gemm_nn_acc(A, B, C, m, l, n);
}

void gemm_tn_acc(const float* A, const float* B, float* C, std::size_t l, std::size_t m,
                 std::size_t n) {
  init();
  g_table->gemm_tn_acc(A, B, C, l, m, n);
}

}  // namespace attachlab::kern
