#pragma once

// Assembles the full pipeline for one density: score moments, evaluated
// expansion cells per (alpha, n), the third-order gap and its two-sided
// counterpart, the adjusted bound, the algebra verification summary, and
// optional Monte Carlo cross-check rows. Renders to JSON, aligned text, and
// plot CSV.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoexp/density.hpp"
#include "hoexp/moments.hpp"
#include "hoexp/simulate.hpp"

namespace hoexp::efficiency {

// (eta3/48) W (z^4 - 4 z^2) / n^{3/2} with z = Phi^-1(1 - alpha/2),
// evaluated from the derived catalog stratum.
double third_order_gap(const moments::ScoreMoments& m, double alpha, double n);

struct Cell {
    double alpha = 0.0;
    double n = 0.0;
    double z = 0.0;            // Phi^-1(1 - alpha/2)
    double eps_v = 0.0;        // one-sided bound, derived form
    double g_expansion = 0.0;  // quantile expansion of the MLE distribution
    double third_order = 0.0;  // g_expansion - eps_v through order n^{-3/2}
    std::array<double, 4> two_sided{};  // two-sided gap strata at (z, -z)
    double adjusted_gap = 0.0;          // gap against the adjusted bound
};

struct SimulationRow {
    double alpha = 0.0;
    int n = 0;
    simulate::GapEstimate gap;
    long solver_failures = 0;
    bool valid = true;
};

struct EfficiencyReport {
    std::string density;
    moments::ScoreMoments moments;
    bool w_pass = false;  // W <= 1e-7 + propagated error
    std::vector<Cell> cells;
    std::string algebra_summary;               // catalog diff report
    std::vector<std::string> algebra_differs;  // equations whose print differs
    bool algebra_ok = false;                   // every recipe reproduced
    std::vector<SimulationRow> simulation;
};

EfficiencyReport build_report(const density::LocationDensity& d,
                              const std::vector<double>& alphas, const std::vector<double>& ns,
                              const std::optional<simulate::SimOptions>& sim = std::nullopt);

nlohmann::json to_json(const EfficiencyReport& r);
std::string to_text(const EfficiencyReport& r);
// Gap-versus-n curve for one alpha; columns n,gap,order3_prediction.
std::string plot_csv(const EfficiencyReport& r, double alpha);

}  // namespace hoexp::efficiency
