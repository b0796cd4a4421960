#pragma once

// Standard normal pdf/cdf/quantile and related special-function helpers.
// The quantile is a rational approximation polished with one Halley step on
// the cdf, good to ~1e-15 absolute over the testable range.

namespace hoexp {

double normal_pdf(double x);

// Phi(x) = 0.5 * erfc(-x / sqrt(2)); accurate in both tails.
double normal_cdf(double x);

// Inverse of normal_cdf on (0, 1). Throws NumericError outside (0, 1).
double inv_normal_cdf(double p);

// Scaled complementary error function exp(z^2) * erfc(z) for z >= 0.
double erfcx(double z);

// phi(v) / Phi(v), stable down to v -> -inf (inverse Mills ratio).
double normal_pdf_over_cdf(double v);

}  // namespace hoexp
