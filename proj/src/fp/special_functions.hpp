#pragma once

namespace fp {

// Numerical special functions backing every p-value in the project.
// Target accuracy: 1e-8 absolute for beta/gamma/F/chi2/normal, 1e-4 for the
// studentized range (numeric double quadrature).

// Regularized incomplete beta I_x(a, b); a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a, x); a > 0, x >= 0.
double regularized_gamma_q(double a, double x);

// Standard normal CDF.
double normal_cdf(double z);

// Survival function of the F distribution with (d1, d2) degrees of freedom.
double f_sf(double f, double d1, double d2);

// Survival function of the chi-squared distribution with k degrees of freedom.
double chi2_sf(double x, double k);

// Survival function of the studentized range for k groups and df error
// degrees of freedom. Computed by Gauss-Legendre double integration.
double studentized_range_sf(double q, int k, double df);

// Inverse of the studentized range survival function: smallest q with
// sf(q) <= alpha. Bisection against studentized_range_sf.
double studentized_range_quantile(double alpha, int k, double df);

}  // namespace fp
