#include "hdgc/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hdgc/errors.hpp"

namespace hdgc {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 500;

// P(a, x) by the power series x^a e^-x / Gamma(a+1) * sum x^n / prod(a+k).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
}

// Q(a, x) by the modified Lentz continued fraction.
double gamma_q_contfrac(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(a * std::log(x) - x - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw ConfigError("gamma shape must be positive, got " + std::to_string(a));
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw ConfigError("gamma shape must be positive, got " + std::to_string(a));
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double chi2_sf(double x, int r) {
  if (r < 1) throw ConfigError("chi-squared dof must be >= 1, got " + std::to_string(r));
  if (!(x >= 0.0)) throw ConfigError("chi-squared statistic must be >= 0");
  return regularized_gamma_q(0.5 * static_cast<double>(r), 0.5 * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError("quantile level must lie in (0, 1), got " + std::to_string(p));
  }
  // Crude start from the tail expansion, then safeguarded Newton on the CDF.
  const double q = std::min(p, 1.0 - p);
  double x = std::sqrt(-2.0 * std::log(q));
  x = x - (std::log(x) + std::log(2.0 * M_PI) / 2.0) / x;  // one asymptotic correction
  if (p < 0.5) x = -x;

  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 60; ++i) {
    const double f = normal_cdf(x) - p;
    if (f > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    const double deriv = normal_pdf(x);
    double next = (deriv > 0.0) ? x - f / deriv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-15 * (1.0 + std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace hdgc
