#pragma once

namespace apsim {

// Natural log of the gamma function for x > 0 (Lanczos, g = 7, n = 9).
double log_gamma(double x);

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with nu > 0 degrees of freedom.
double student_t_cdf(double t, double nu);

// Upper tail 1 - F(t, nu), computed without cancellation for large t.
double student_t_sf(double t, double nu);

}  // namespace apsim
