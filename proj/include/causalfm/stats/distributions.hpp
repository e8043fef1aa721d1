#pragma once

namespace causalfm::stats {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
/// Evaluated by the modified Lentz continued fraction, switching to
/// 1 - I_{1-x}(b, a) when x > (a + 1) / (a + b + 2).
double incomplete_beta(double a, double b, double x);

/// P(T > t) for Student's t with df > 0 degrees of freedom.
double t_sf(double t, double df);

/// Two-sided p-value 2 * P(T > |t|).
double t_two_sided(double t, double df);

/// P(F > f) for the F(d1, d2) distribution. Returns 1 for f <= 0.
double f_sf(double f, double d1, double d2);

}  // namespace causalfm::stats
