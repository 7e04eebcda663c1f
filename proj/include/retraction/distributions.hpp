#pragma once

// Special functions and distribution tails used by the hypothesis tests.
// The incomplete beta and gamma functions are evaluated with the classic
// power-series / modified-Lentz continued-fraction pair and are accurate to
// roughly 1e-14 relative over the parameter ranges the tests use.

namespace retraction::stats {

double normal_cdf(double z);
// P(|Z| >= |z|)
double normal_two_sided_p(double z);

// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double regularized_beta(double x, double a, double b);

// P(|T| >= |t|) for Student's t with (possibly fractional) df.
double student_t_two_sided_p(double t, double df);

// P(F >= f) for F(df1, df2).
double f_upper_tail(double f, double df1, double df2);

// P(X >= x) for chi-square with df degrees of freedom.
double chi_square_upper_tail(double x, double df);

}  // namespace retraction::stats
