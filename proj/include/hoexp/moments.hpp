#pragma once

// Score-moment functionals of a normalized location density:
//   eta2 = E psi_2^2   eta3 = E psi_1^3   eta4 = E psi_1^4
//   eta5 = E psi_1^5   eta6 = E (psi_2 psi_3)
//   W    = 1 - eta2 + eta4/3 + eta3^2/4   (<= 0, zero exactly for Gaussian)
// plus numeric verification of the identity E psi_1^2 psi_2 = (2/3) E psi_1^4
// and of the Cauchy-Schwarz bound (E psi_1^3)^2 <= 4 E psi_1^2 var(psi_1').

#include <json.hpp>

#include "hoexp/asympoly.hpp"
#include "hoexp/density.hpp"

namespace hoexp::moments {

struct FunctionalValue {
    double value = 0.0;
    double error = 0.0;  // propagated quadrature + tail-truncation bound
};

struct ScoreMoments {
    FunctionalValue eta2, eta3, eta4, eta5, eta6;
    FunctionalValue fisher;  // E psi_1^2, recomputed as a cross-check
    FunctionalValue w;

    algebra::MomentValues values() const;
};

// 1 - eta2 + eta4/3 + eta3^2/4.
double compute_w(double eta2, double eta3, double eta4);

// Requires |E psi_1^2 - 1| <= fisher_tol; throws NumericError otherwise.
ScoreMoments compute_moments(const density::LocationDensity& d, double fisher_tol = 1e-6);

struct IdentityReport {
    double lhs = 0.0;  // E psi_1^2 psi_2
    double rhs = 0.0;  // (2/3) E psi_1^4
    double error = 0.0;
    double tolerance = 0.0;  // 1e-6 + propagated error
    bool pass = false;
};
IdentityReport verify_identity(const density::LocationDensity& d);

struct CauchySchwarzReport {
    double lhs = 0.0;         // (E psi_1^3)^2
    double rhs = 0.0;         // 4 E psi_1^2 var(psi_1')
    double margin = 0.0;      // rhs - lhs, non-negative up to tolerance
    double mean_psi1p = 0.0;  // E psi_1'; equals -E psi_1^2 under regularity
    double var_psi1p = 0.0;
    FunctionalValue w;
    double tolerance = 0.0;  // 1e-7 + propagated error
    bool inequality_pass = false;
    bool w_pass = false;  // w.value <= tolerance
};
CauchySchwarzReport verify_cauchy_schwarz(const density::LocationDensity& d);

// {functional: {value, error, tolerance, pass}} per field.
nlohmann::json to_json(const ScoreMoments& m);
nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const CauchySchwarzReport& r);

}  // namespace hoexp::moments
