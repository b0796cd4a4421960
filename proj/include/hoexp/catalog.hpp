#pragma once

// Catalog of the displayed expansions, each kept in two forms: TRANSCRIBED
// (coefficient-by-coefficient as printed) and, where a recipe exists, DERIVED
// (recomputed by the exact algebra engine from upstream entries). Where the
// two disagree the derived form is authoritative for numeric use and the
// residual is always reported.
//
// Recipes:
//   EQ6  = substitute_symmetric(EQ5)
//   EQ7  = substitute_symmetric(EQ2) - derived EQ6
//   EQ8  = factor check of EQ7 against (eta3/48) * W * (Z^4 - 4 Z^2)
//   EQ12 = EQ2(at v) - EQ2(renamed to u) - EQ3
//   EQ13 = EQ5 + the unique order-3 adjustment a*Zv^2*Zu^2 + b*Zv*Zu whose
//          symmetric substitution equals the EQ7 stratum

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hoexp/asympoly.hpp"

namespace hoexp::catalog {

enum class EquationId { eq2, eq3, eq5, eq6, eq7, eq8, eq12, eq13 };

inline constexpr EquationId kAllEquations[] = {
    EquationId::eq2, EquationId::eq3,  EquationId::eq5,  EquationId::eq6,
    EquationId::eq7, EquationId::eq8, EquationId::eq12, EquationId::eq13};

std::string_view to_string(EquationId id);                     // "EQ2", ...
std::optional<EquationId> equation_from_string(std::string_view name);

struct CatalogEntry {
    EquationId id;
    std::string recipe;  // empty for transcription-only entries (EQ2, EQ3, EQ5)
    algebra::AsymPoly transcribed;
    std::optional<algebra::AsymPoly> derived;
    // (derived - transcribed) with W expanded; meaningful only when derived.
    std::optional<algebra::AsymPoly> residual;
    bool matches = true;    // residual empty (vacuously true without a recipe)
    bool recipe_ok = true;  // internal consistency of the derivation itself
    std::vector<std::string> notes;
};

// Built once on first use, immutable afterwards.
const CatalogEntry& entry(EquationId id);
const std::vector<CatalogEntry>& all_entries();

const algebra::AsymPoly& transcribed(EquationId id);

// Derived form where a recipe exists, transcription otherwise (the authority
// rule for downstream numeric use).
const algebra::AsymPoly& authoritative(EquationId id);

struct AdjustmentReport {
    algebra::AsymPoly adjusted;      // EQ5 plus the derived adjustment terms
    algebra::EtaPoly coeff_v2u2;     // derived a (multiplies Zv^2*Zu^2)
    algebra::EtaPoly coeff_vu;       // derived b (multiplies Zv*Zu)
    bool cancellation_ok = false;    // substitute_symmetric(EQ2 - adjusted) == 0
    // Exact difference (derived - printed) of the two adjustment coefficients.
    algebra::EtaPoly diff_v2u2;
    algebra::EtaPoly diff_vu;
    std::string note;
};

AdjustmentReport adjusted_epsilon_v();

// One block per equation: status MATCHES/DIFFERS, residual rendering, recipe.
std::string verify_algebra_report();

// True when every derivation recipe completed consistently. Transcription
// diffs do not count as failures; they are findings.
bool all_recipes_ok();

}  // namespace hoexp::catalog
