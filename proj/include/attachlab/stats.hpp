#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace attachlab::stats {

struct TTest {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-tailed
};

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Student-t CDF P(T <= t) with df degrees of freedom.
double student_t_cdf(double t, double df);

// One-sample two-tailed t-test against zero. Throws on n < 2 or sd == 0.
TTest one_sample_t(const std::vector<double>& deltas);

// JZS one-sample Bayes factor (Cauchy prior on effect size, scale r),
// computed by adaptive quadrature to relative tolerance `tol`. The
// integration runs in log space, so extreme evidence is handled; values
// beyond the double exponent range saturate at the largest finite double.
double jzs_bayes_factor(double t, std::size_t n, double scale = 0.7071067811865476,
                        double tol = 1e-8);

struct TestResult {
  std::string experiment_id;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  double bf10 = 1.0;
  std::size_t bonferroni_m = 1;
  bool significant = false;
};

bool bonferroni_decide(double p, std::size_t m, double alpha = 0.05);

TestResult analyze(const std::string& experiment_id, const std::vector<double>& deltas,
                   std::size_t bonferroni_m);

// Stats CSV: experiment id, n, mean, sd, t, df, p, BF10, bonferroni_m,
// decision.
void write_stats_csv(const std::vector<TestResult>& results, const std::string& path);

}  // namespace attachlab::stats
