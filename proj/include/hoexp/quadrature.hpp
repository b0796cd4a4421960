#pragma once

// Globally adaptive Gauss-Kronrod (G7,K15) quadrature on a finite interval.
// The worst segment (largest error estimate) is bisected until the summed
// error estimate meets the absolute tolerance or the panel budget runs out.

#include <functional>

namespace hoexp {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_panels = 1 << 16;
    int initial_panels = 16;
    // When false, hitting the panel budget returns the best estimate instead
    // of throwing; used for tail-truncation margins.
    bool strict = true;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // summed per-panel |K15 - G7| estimates
    int panels = 0;
};

// Throws QuadratureError on non-finite integrand values, or (when strict)
// when abs_tol is not met at max_panels.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

}  // namespace hoexp
