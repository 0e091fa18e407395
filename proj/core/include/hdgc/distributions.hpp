#pragma once

namespace hdgc {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Power series for x < a + 1, continued fraction otherwise; absolute error
/// is below 1e-12 over the ranges used here.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-squared distribution with r degrees of
/// freedom: Pr(X > x) = Q(r/2, x/2).
double chi2_sf(double x, int r);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Inverse standard normal CDF for p in (0, 1); Newton-refined to roughly
/// machine precision.
double normal_quantile(double p);

}  // namespace hdgc
