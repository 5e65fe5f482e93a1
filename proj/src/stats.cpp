#include "attachlab/stats.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "attachlab/errors.hpp"

namespace attachlab::stats {

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  constexpr int max_iter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NumericalError("incomplete beta continued fraction failed to converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw NumericalError("incomplete_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(b * std::log(1.0 - x) + a * std::log(x) - log_beta(b, a)) *
                   beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (df <= 0.0) throw NumericalError("student_t_cdf: df must be positive");
  const double x = df / (df + t * t);
  const double half_tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

TTest one_sample_t(const std::vector<double>& deltas) {
  const std::size_t n = deltas.size();
  if (n < 2) throw DataError("one_sample_t: need at least 2 observations");
  double mean = 0.0;
  for (double d : deltas) mean += d;
  mean /= double(n);
  double ss = 0.0;
  for (double d : deltas) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / double(n - 1));
  if (sd == 0.0) throw DataError("one_sample_t: degenerate sample (sd = 0)");

  TTest result;
  result.n = n;
  result.mean = mean;
  result.sd = sd;
  result.df = double(n - 1);
  result.t = mean / (sd / std::sqrt(double(n)));
  // Two-tailed p via the regularized incomplete beta.
  result.p = incomplete_beta(0.5 * result.df, 0.5, result.df / (result.df + result.t * result.t));
  return result;
}

namespace {

struct JzsIntegrand {
  double t2;      // t^2
  double nu;      // n - 1
  double nr2;     // n * r^2
  double log_null;
  // Peak of the log integrand; subtracted before exponentiating so the
  // quadrature stays in floating range even when log BF10 is in the
  // hundreds (large |t| with large n).
  double log_shift = 0.0;

  // log of h(g) = integrand / null likelihood, transformed to z in (0,1)
  // with g = z / (1 - z), Jacobian included. BF10 = integral of h.
  double log_transformed(double z) const {
    if (z <= 0.0) return -std::numeric_limits<double>::infinity();
    if (z >= 1.0) {
      // g -> inf limit of h(g) * (1+g)^2.
      return -0.5 * std::log(2.0 * M_PI) - 0.5 * std::log(nr2) - log_null;
    }
    const double g = z / (1.0 - z);
    const double w = 1.0 + nr2 * g;
    return -0.5 * std::log(w) - 0.5 * (nu + 1.0) * std::log1p(t2 / (w * nu)) -
           0.5 * std::log(2.0 * M_PI) - 1.5 * std::log(g) - 1.0 / (2.0 * g) - log_null -
           2.0 * std::log1p(-z);
  }

  double transformed(double z) const {
    const double lg = log_transformed(z);
    return std::isfinite(lg) ? std::exp(lg - log_shift) : 0.0;
  }
};

double adaptive_simpson(const JzsIntegrand& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f.transformed(lm);
  const double frm = f.transformed(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw NumericalError("jzs_bayes_factor: quadrature failed to converge");
  }
  if (std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double jzs_bayes_factor(double t, std::size_t n, double scale, double tol) {
  if (n < 2) throw DataError("jzs_bayes_factor: need n >= 2");
  if (!std::isfinite(t)) throw DataError("jzs_bayes_factor: t must be finite");
  if (scale <= 0.0) throw ConfigError("jzs_bayes_factor: scale must be positive");

  JzsIntegrand f;
  f.t2 = t * t;
  f.nu = double(n - 1);
  f.nr2 = double(n) * scale * scale;
  f.log_null = -0.5 * (f.nu + 1.0) * std::log1p(f.t2 / f.nu);

  // Locate the integrand's peak on a coarse grid and shift by it, so the
  // exponentials stay in range no matter how extreme t is.
  const int coarse = 64;
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= coarse; ++i) {
    max_log = std::max(max_log, f.log_transformed(double(i) / coarse));
  }
  if (std::isfinite(max_log)) f.log_shift = max_log;

  // Coarse composite pass seeds the absolute tolerance, then refine
  // adaptively; BF10(-t) = BF10(t) by evenness in t^2.
  double rough = 0.0;
  double prev = f.transformed(0.0);
  for (int i = 1; i <= coarse; ++i) {
    const double z = double(i) / coarse;
    const double fz = f.transformed(z);
    rough += 0.5 * (prev + fz) / coarse;
    prev = fz;
  }
  const double abs_tol = std::max(rough, 1e-300) * tol;

  const double fa = f.transformed(0.0);
  const double fb = f.transformed(1.0);
  const double fm = f.transformed(0.5);
  const double whole = 1.0 / 6.0 * (fa + 4.0 * fm + fb);
  const double integral = adaptive_simpson(f, 0.0, 1.0, fa, fm, fb, whole, abs_tol, 60);
  const double log_bf = std::log(integral) + f.log_shift;
  // Beyond the double exponent range the Bayes factor saturates; report the
  // largest representable value rather than infinity.
  if (log_bf >= std::log(std::numeric_limits<double>::max())) {
    return std::numeric_limits<double>::max();
  }
  return std::exp(log_bf);
}

bool bonferroni_decide(double p, std::size_t m, double alpha) {
  if (m < 1) throw ConfigError("bonferroni_decide: m must be >= 1");
  if (p < 0.0 || p > 1.0) throw DataError("bonferroni_decide: p outside [0,1]");
  return p < alpha / double(m);
}

TestResult analyze(const std::string& experiment_id, const std::vector<double>& deltas,
                   std::size_t bonferroni_m) {
  const TTest tt = one_sample_t(deltas);
  TestResult result;
  result.experiment_id = experiment_id;
  result.n = tt.n;
  result.mean = tt.mean;
  result.sd = tt.sd;
  result.t = tt.t;
  result.df = tt.df;
  result.p = tt.p;
  result.bf10 = jzs_bayes_factor(tt.t, tt.n);
  result.bonferroni_m = bonferroni_m;
  result.significant = bonferroni_decide(tt.p, bonferroni_m);
  return result;
}

void write_stats_csv(const std::vector<TestResult>& results, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write stats CSV: " + path);
  out << "experiment_id,n,mean,sd,t,df,p,bf10,bonferroni_m,decision\n";
  out << std::setprecision(12);
  for (const auto& r : results) {
    out << r.experiment_id << ',' << r.n << ',' << r.mean << ',' << r.sd << ',' << r.t << ','
        << r.df << ',' << r.p << ',' << r.bf10 << ',' << r.bonferroni_m << ','
        << (r.significant ? "significant" : "not-significant") << '\n';
  }
}

}  // namespace attachlab::stats
