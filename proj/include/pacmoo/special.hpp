#pragma once

namespace pacmoo::stats {

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal CDF.
double normal_cdf(double z);

/// ln Phi(z), accurate for z down to about -1e150.
double log_normal_cdf(double z);

/// phi(z) / Phi(z) (inverse Mills ratio), finite for all finite z.
double normal_hazard(double z);

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// Information gain of upper-truncating a standard normal at gamma:
///   gamma phi(gamma) / (2 Phi(gamma)) - ln Phi(gamma).
/// Non-negative, non-increasing in gamma, and finite for very negative gamma.
double truncation_gain(double gamma);

}  // namespace pacmoo::stats
