#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "attachlab/kernels.hpp"
#include "attachlab/rng.hpp"

using namespace attachlab;

namespace {

std::vector<float> random_vec(Rng& rng, std::size_t n) {
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng.uniform_real(-1.0, 1.0));
  return v;
}

// Error budget for reassociated float sums over n terms of magnitude <= 1.
double sum_tol(std::size_t n) { return 1e-6 * double(n); }

}  // namespace

TEST_CASE("scalar dot matches a double-precision reference") {
  Rng rng(1);
  for (std::size_t n : {0ul, 1ul, 7ul, 8ul, 9ul, 63ul, 257ul}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    double ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) ref += double(x[i]) * double(y[i]);
    CHECK(std::abs(double(double(kern::detail::dot_scalar(x.data(), y.data(), n))) - double(ref)) <= (sum_tol(n ? n : 1)));
  }
}

TEST_CASE("avx2 kernels match scalar kernels on awkward sizes") {
  if (!kern::detail::avx2_available()) return;
  Rng rng(2);
  for (std::size_t n : {1ul, 5ul, 8ul, 13ul, 16ul, 31ul, 100ul, 513ul}) {
    const auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);

    CHECK(std::abs(double(kern::detail::dot_avx2(x.data(), y.data(), n)) -
                   double(kern::detail::dot_scalar(x.data(), y.data(), n))) <= sum_tol(n));

    auto y_scalar = y;
    auto y_avx2 = y;
    kern::detail::axpy_scalar(0.37f, x.data(), y_scalar.data(), n);
    kern::detail::axpy_avx2(0.37f, x.data(), y_avx2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(double(y_avx2[i]) - double(y_scalar[i])) <= (1e-6));
    }
  }
}

TEST_CASE("avx2 gemm variants match scalar") {
  if (!kern::detail::avx2_available()) return;
  Rng rng(3);
  struct Shape { std::size_t m, n, k; };
  for (const auto& s : {Shape{1, 1, 1}, Shape{2, 3, 5}, Shape{4, 8, 16}, Shape{7, 13, 29},
                        Shape{16, 16, 33}}) {
    const auto A = random_vec(rng, s.m * s.k);
    const auto B = random_vec(rng, s.n * s.k);
    const auto bias = random_vec(rng, s.n);

    std::vector<float> C_ref(s.m * s.n), C_simd(s.m * s.n);
    kern::detail::gemm_nt_scalar(A.data(), B.data(), C_ref.data(), s.m, s.n, s.k, bias.data());
    kern::detail::gemm_nt_avx2(A.data(), B.data(), C_simd.data(), s.m, s.n, s.k, bias.data());
    for (std::size_t i = 0; i < C_ref.size(); ++i) {
      CHECK(std::abs(double(C_simd[i]) - double(C_ref[i])) <= (sum_tol(s.k)));
    }

    // Accumulating variants: A is m x l, B is l x n (reuse k as l).
    const auto A2 = random_vec(rng, s.m * s.k);
    const auto B2 = random_vec(rng, s.k * s.n);
    auto acc_ref = random_vec(rng, s.m * s.n);
    auto acc_simd = acc_ref;
    kern::detail::gemm_nn_acc_scalar(A2.data(), B2.data(), acc_ref.data(), s.m, s.k, s.n);
    kern::detail::gemm_nn_acc_avx2(A2.data(), B2.data(), acc_simd.data(), s.m, s.k, s.n);
    for (std::size_t i = 0; i < acc_ref.size(); ++i) {
      CHECK(std::abs(double(acc_simd[i]) - double(acc_ref[i])) <= (sum_tol(s.k)));
    }

    const auto A3 = random_vec(rng, s.k * s.m);  // l x m
    auto acc2_ref = random_vec(rng, s.m * s.n);
    auto acc2_simd = acc2_ref;
    kern::detail::gemm_tn_acc_scalar(A3.data(), B2.data(), acc2_ref.data(), s.k, s.m, s.n);
    kern::detail::gemm_tn_acc_avx2(A3.data(), B2.data(), acc2_simd.data(), s.k, s.m, s.n);
    for (std::size_t i = 0; i < acc2_ref.size(); ++i) {
      CHECK(std::abs(double(acc2_simd[i]) - double(acc2_ref[i])) <= (sum_tol(s.k)));
    }
  }
}

TEST_CASE("gemm_nt with null bias treats bias as zero") {
  Rng rng(4);
  const auto A = random_vec(rng, 3 * 4);
  const auto B = random_vec(rng, 2 * 4);
  const std::vector<float> zero_bias(2, 0.0f);
  std::vector<float> C1(3 * 2), C2(3 * 2);
  kern::gemm_nt(A.data(), B.data(), C1.data(), 3, 2, 4, nullptr);
  kern::gemm_nt(A.data(), B.data(), C2.data(), 3, 2, 4, zero_bias.data());
  for (std::size_t i = 0; i < C1.size(); ++i) CHECK(C1[i] == C2[i]);
}

TEST_CASE("dispatch honours force() and reports the active implementation") {
  kern::force(kern::Impl::scalar);
  CHECK(kern::active() == kern::Impl::scalar);
  const std::vector<float> x{1.0f, 2.0f, 3.0f};
  CHECK(kern::dot(x.data(), x.data(), 3) == doctest::Approx(14.0));
  if (kern::detail::avx2_available()) {
    kern::force(kern::Impl::avx2);
    CHECK(kern::active() == kern::Impl::avx2);
    CHECK(kern::dot(x.data(), x.data(), 3) == doctest::Approx(14.0));
  }
  kern::reset();
}

TEST_CASE("double overloads are exact on small integer inputs") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{5, 6, 7, 8};
  CHECK(kern::dot(x.data(), y.data(), 4) == 70.0);
  std::vector<double> z = y;
  kern::axpy(2.0, x.data(), z.data(), 4);
  CHECK(z == std::vector<double>{7, 10, 13, 16});
  // 2x2 products through each gemm variant against hand-checked values.
  const std::vector<double> A{1, 2, 3, 4};
  const std::vector<double> B{5, 6, 7, 8};
  std::vector<double> C(4, 0.0);
  kern::gemm_nn_acc(A.data(), B.data(), C.data(), 2, 2, 2);
  CHECK(C == std::vector<double>{19, 22, 43, 50});
  std::vector<double> D(4, 0.0);
  kern::gemm_tn_acc(A.data(), B.data(), D.data(), 2, 2, 2);
  CHECK(D == std::vector<double>{26, 30, 38, 44});
  std::vector<double> E(4, 0.0);
  kern::gemm_nt(A.data(), B.data(), E.data(), 2, 2, 2, nullptr);
  CHECK(E == std::vector<double>{17, 23, 39, 53});
}
