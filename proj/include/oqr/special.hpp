#pragma once

namespace oqr::special {

double normal_pdf(double x);
double normal_cdf(double x);
/// Acklam's rational approximation followed by one Halley step.
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

double student_t_pdf(double x, double nu);
double student_t_cdf(double x, double nu);
/// Bisection on the CDF until |F(q) - p| <= 1e-12 (or the bracket collapses).
double student_t_quantile(double p, double nu);

} // namespace oqr::special
