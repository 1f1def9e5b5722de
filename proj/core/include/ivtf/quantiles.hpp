#pragma once

namespace ivtf {

// Standard normal helpers. Levels are significance levels alpha in (0, 1).

double normal_cdf(double x);
double normal_quantile(double p);

/// z_{1-alpha/2}: the two-sided normal cutoff (1.959964 at alpha = 0.05).
double two_sided_z(double alpha);

/// chi-square(1) upper-alpha critical value, i.e. two_sided_z(alpha)^2.
double chi2_1_critical(double alpha);

inline constexpr double kAlpha5 = 0.05;
inline constexpr double kAlpha1 = 0.01;

}  // namespace ivtf
