#ifndef FAULTCAST_MATH_SPECIAL_HPP
#define FAULTCAST_MATH_SPECIAL_HPP

// Scalar special functions used by the distribution families.
// All routines target absolute/relative accuracy better than 1e-10 over
// the parameter ranges exercised by the tests (a, b in [1e-3, 1e4],
// arguments away from the extreme tails).

namespace faultcast::math {

// Digamma function psi(x) = d/dx log Gamma(x), x > 0.
double digamma(double x);

// Regularized lower incomplete gamma P(a, x) and upper Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Inverse of P(a, .) in its second argument: returns x with P(a, x) = p.
double gamma_p_inv(double a, double p);

// Regularized incomplete beta I_x(a, b).
double inc_beta(double a, double b, double x);

// Student t distribution with df degrees of freedom.
double student_t_log_pdf(double t, double df);
double student_t_cdf(double t, double df);
double student_t_quantile(double p, double df);

// d/d(df) of log f_T(t; df) holding t fixed.
double student_t_dlogpdf_ddf(double t, double df);

}  // namespace faultcast::math

#endif
