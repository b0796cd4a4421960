#pragma once

// Monte Carlo study of the location MLE: per-replication maximum-likelihood
// solves, empirical quantiles of sqrt(n) * theta_hat with standard errors,
// and comparison against the catalog expansions. Replications derive
// independent generators from (seed, rep) so results are identical for any
// worker count; simulate_gn runs the replication loop with OpenMP while
// simulate_gn_serial is the plain-loop reference used for testing.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hoexp/density.hpp"
#include "hoexp/moments.hpp"

namespace hoexp::simulate {

struct MleOptions {
    double bracket_iqr_multiple = 10.0;  // half-width of the search bracket
    int grid_intervals = 32;             // sign-change scan before Newton
    int max_newton = 100;
    double tol = 1e-11;  // relative step/width convergence threshold
};

// Location MLE: argmax over theta of sum log f(x_i - theta), searched on
// [median - 10 IQR, median + 10 IQR] by grid scan plus safeguarded Newton on
// the score; among multiple score roots the highest log-likelihood wins.
// Throws SolverFailure when no admissible root exists.
double mle_solve(std::span<const double> sample, const density::LocationDensity& d,
                 const MleOptions& opts = {});

struct SimOptions {
    std::vector<double> v_levels = {0.5, 0.975};  // 0.5 is added when missing
    int reps = 10000;                             // >= 1000
    std::uint64_t seed = 1;
    bool bootstrap_se = false;  // default: analytic KDE-based standard errors
    int bootstrap_b = 500;
    double failure_threshold = 1e-4;  // max tolerated solver-failure fraction
    int threads = 0;                  // 0: library default
    MleOptions mle;
};

struct QuantileRow {
    double v = 0.0;
    double raw_q = 0.0;  // empirical v-quantile of sqrt(n) * theta_hat
    double se = 0.0;     // standard error of raw_q
};

struct SimulationResult {
    std::string density;
    int n = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    std::vector<QuantileRow> rows;      // ascending in v; always contains 0.5
    std::vector<double> scaled_sorted;  // successful sqrt(n) * theta_hat draws
    double bandwidth = 0.0;             // KDE bandwidth behind the SEs
    long solver_failures = 0;
    bool valid = true;  // failure fraction below threshold

    const QuantileRow& row(double v) const;  // ConfigError when missing
    double median() const { return row(0.5).raw_q; }
};

SimulationResult simulate_gn(const density::LocationDensity& d, int n, const SimOptions& opts);
SimulationResult simulate_gn_serial(const density::LocationDensity& d, int n,
                                    const SimOptions& opts);

// Empirical median-centered quantile difference q(v) - q(1/2) with the
// order-statistic covariance folded into its standard error.
struct CenteredQuantile {
    double value = 0.0;
    double se = 0.0;
};
CenteredQuantile centered_quantile(const SimulationResult& r, double v);

// Median-centered quantile of sqrt(n) * theta_hat predicted by the catalog
// expansion of G_n^{-1}(v) - G_n^{-1}(1/2) (derived form).
double quantile_expansion(const moments::ScoreMoments& m, double v, double n);

struct GapEstimate {
    double empirical = 0.0;  // q(1-alpha/2) - q(1/2), empirical
    double expansion = 0.0;  // eps_v from the derived catalog polynomial
    double gap = 0.0;        // empirical - expansion
    double se = 0.0;
};
GapEstimate empirical_gap(const SimulationResult& r, const moments::ScoreMoments& m,
                          double alpha);

// Columns: density,n,reps,seed,v,empirical_q,se,expansion_q,gap with the
// empirical and expansion quantiles both median-centered.
std::string to_csv(const SimulationResult& r, const moments::ScoreMoments& m);

// Interpolated order statistic (the common "type 7" rule).
double type7_quantile(std::span<const double> sorted, double v);
double silverman_bandwidth(std::span<const double> sorted);
double kde_density(std::span<const double> sorted, double bandwidth, double x);

// max_i max(|F(x_(i)) - i/m|, |F(x_(i)) - (i+1)/m|) over sorted data.
double ks_statistic(std::span<const double> sorted,
                    const std::function<double(double)>& cdf);

}  // namespace hoexp::simulate
