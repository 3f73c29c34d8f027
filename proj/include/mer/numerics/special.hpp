#pragma once

namespace mer::numerics {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
///
/// Evaluated with the modified Lentz continued fraction, switching to the
/// symmetric form I_x(a,b) = 1 - I_{1-x}(b,a) where that converges faster.
/// Relative accuracy is close to machine precision for the argument ranges
/// that Student-t tail probabilities need.
double regularized_incomplete_beta(double a, double b, double x);

/// Student-t cumulative distribution function with `df` > 0 degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|). Returns 1 for t = 0 and a
/// value in [0, 1] for every finite t.
double student_t_two_sided_p(double t, double df);

}  // namespace mer::numerics
