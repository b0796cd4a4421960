#include "hoexp/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hoexp/catalog.hpp"
#include "hoexp/errors.hpp"
#include "hoexp/normal.hpp"
#include "hoexp/rng.hpp"

namespace hoexp::simulate {

namespace {

using density::LocationDensity;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ScorePair {
    double score = 0.0;  // sum psi_1(r_i - delta)
    double slope = 0.0;  // d(score)/d(delta) = -sum psi_1'(r_i - delta)
};

// All solver arithmetic runs in residual coordinates r_i = x_i - median so
// that shifting the whole sample shifts the returned estimate and nothing
// else.
struct ScoreContext {
    const std::vector<double>& residuals;
    const LocationDensity& d;

    ScorePair eval(double delta) const {
        ScorePair p;
        for (double r : residuals) {
            double y = r - delta;
            double s1 = d.psi(1, y);
            p.score += s1;
            p.slope -= d.psi(2, y) - s1 * s1;
        }
        return p;
    }
    double loglik(double delta) const {
        double l = 0.0;
        for (double r : residuals) l += std::log(d.pdf(r - delta));
        return l;
    }
};

// Newton on the score, falling back to bisection whenever the Newton step
// leaves the sign-change bracket [lo, hi].
double polish_root(const ScoreContext& ctx, double lo, double hi, double s_lo,
                   const MleOptions& opts) {
    double delta = 0.5 * (lo + hi);
    for (int it = 0; it < opts.max_newton; ++it) {
        ScorePair p = ctx.eval(delta);
        if (p.score == 0.0) return delta;
        if ((p.score > 0.0) == (s_lo > 0.0)) {
            lo = delta;
        } else {
            hi = delta;
        }
        double next = delta - p.score / p.slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        double width = hi - lo;
        if (std::fabs(next - delta) <= opts.tol * (1.0 + std::fabs(next)) ||
            width <= opts.tol * (1.0 + std::fabs(next))) {
            return next;
        }
        delta = next;
    }
    throw SolverFailure("score root refinement did not converge");
}

}  // namespace

double type7_quantile(std::span<const double> sorted, double v) {
    if (sorted.empty()) throw NumericError("quantile of an empty sample");
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("quantile level outside [0,1]");
    double h = (static_cast<double>(sorted.size()) - 1.0) * v;
    auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double silverman_bandwidth(std::span<const double> sorted) {
    if (sorted.size() < 2) throw NumericError("bandwidth needs at least two points");
    double mean = 0.0;
    for (double x : sorted) mean += x;
    mean /= static_cast<double>(sorted.size());
    double ss = 0.0;
    for (double x : sorted) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / (static_cast<double>(sorted.size()) - 1.0));
    double iqr = type7_quantile(sorted, 0.75) - type7_quantile(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
    return 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
}

double kde_density(std::span<const double> sorted, double bandwidth, double x) {
    if (!(bandwidth > 0.0)) throw NumericError("kernel bandwidth must be positive");
    double acc = 0.0;
    for (double xi : sorted) acc += normal_pdf((x - xi) / bandwidth);
    return acc / (bandwidth * static_cast<double>(sorted.size()));
}

double ks_statistic(std::span<const double> sorted,
                    const std::function<double(double)>& cdf) {
    double m = static_cast<double>(sorted.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double f = cdf(sorted[i]);
        dmax = std::max(dmax, std::fabs(f - static_cast<double>(i) / m));
        dmax = std::max(dmax, std::fabs(f - static_cast<double>(i + 1) / m));
    }
    return dmax;
}

double mle_solve(std::span<const double> sample, const LocationDensity& d,
                 const MleOptions& opts) {
    if (sample.empty()) throw ConfigError("mle_solve: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = type7_quantile(sorted, 0.5);
    const double iqr = type7_quantile(sorted, 0.75) - type7_quantile(sorted, 0.25);

    std::vector<double> residuals(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) residuals[i] = sorted[i] - median;

    double half = opts.bracket_iqr_multiple * iqr;
    if (!(half > 1e-8)) half = 10.0;
    // Keep every x_i - theta inside the density's working support so pdf and
    // psi stay well above the positivity threshold.
    auto [supp_lo, supp_hi] = d.support();
    double lo = std::max(-half, residuals.back() - supp_hi);
    double hi = std::min(half, residuals.front() - supp_lo);
    if (!(lo < hi)) {
        throw SolverFailure("sample spread exceeds the admissible location bracket");
    }

    ScoreContext ctx{residuals, d};
    const int grid = std::max(2, opts.grid_intervals);
    double prev_delta = lo;
    double prev_score = ctx.eval(lo).score;
    double best_delta = kNaN;
    double best_loglik = -std::numeric_limits<double>::infinity();
    auto consider = [&](double delta) {
        double l = ctx.loglik(delta);
        if (l > best_loglik) {
            best_loglik = l;
            best_delta = delta;
        }
    };
    if (prev_score == 0.0) consider(lo);
    for (int j = 1; j <= grid; ++j) {
        double delta = lo + (hi - lo) * j / grid;
        double score = ctx.eval(delta).score;
        if (score == 0.0) {
            consider(delta);
        } else if ((score > 0.0) != (prev_score > 0.0) && prev_score != 0.0) {
            consider(polish_root(ctx, prev_delta, delta, prev_score, opts));
        }
        prev_delta = delta;
        prev_score = score;
    }
    if (!std::isfinite(best_delta)) {
        throw SolverFailure("no score root inside the location bracket");
    }
    return median + best_delta;
}

const QuantileRow& SimulationResult::row(double v) const {
    for (const auto& r : rows) {
        if (std::fabs(r.v - v) <= 1e-12) return r;
    }
    std::ostringstream msg;
    msg << "quantile level " << v << " was not simulated";
    throw ConfigError(msg.str());
}

namespace {

std::vector<double> normalize_levels(const std::vector<double>& levels) {
    std::vector<double> v = levels;
    v.push_back(0.5);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::fabs(a - b) <= 1e-12; }),
            v.end());
    for (double level : v) {
        if (!(level > 0.0 && level < 1.0)) {
            throw ConfigError("quantile levels must lie strictly inside (0,1)");
        }
    }
    return v;
}

double bootstrap_se(const std::vector<double>& sorted, double v, std::uint64_t seed, int b_count) {
    const std::size_t m = sorted.size();
    std::vector<double> qs(static_cast<std::size_t>(b_count));
    std::vector<double> resample(m);
    for (int b = 0; b < b_count; ++b) {
        auto rng = make_stream(seed, (1ull << 30) + static_cast<std::uint64_t>(b));
        for (auto& x : resample) {
            auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(m));
            x = sorted[std::min(idx, m - 1)];
        }
        std::sort(resample.begin(), resample.end());
        qs[static_cast<std::size_t>(b)] = type7_quantile(resample, v);
    }
    double mean = 0.0;
    for (double q : qs) mean += q;
    mean /= static_cast<double>(b_count);
    double ss = 0.0;
    for (double q : qs) ss += (q - mean) * (q - mean);
    return std::sqrt(ss / (static_cast<double>(b_count) - 1.0));
}

SimulationResult run_reps(const LocationDensity& d, int n, const SimOptions& opts,
                          bool parallel) {
    if (n < 1) throw ConfigError("sample size must be >= 1");
    if (opts.reps < 1000) throw ConfigError("reps must be >= 1000");
    std::vector<double> levels = normalize_levels(opts.v_levels);
    if (!d.is_normalized(1e-6)) {
        throw NumericError("simulation requires a density normalized to unit Fisher information");
    }

    std::vector<double> scaled(static_cast<std::size_t>(opts.reps), kNaN);
    std::atomic<long> failures{0};
    const double root_n = std::sqrt(static_cast<double>(n));

    auto one_rep = [&](int rep) {
        auto rng = make_stream(opts.seed, static_cast<std::uint64_t>(rep));
        std::vector<double> xs(static_cast<std::size_t>(n));
        for (auto& x : xs) x = d.sample_one(rng);
        try {
            scaled[static_cast<std::size_t>(rep)] = root_n * mle_solve(xs, d, opts.mle);
        } catch (const SolverFailure&) {
            failures.fetch_add(1, std::memory_order_relaxed);
        } catch (const NumericError&) {
            failures.fetch_add(1, std::memory_order_relaxed);
        }
    };

    if (parallel) {
#ifdef _OPENMP
        int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
        for (int rep = 0; rep < opts.reps; ++rep) one_rep(rep);
#else
        for (int rep = 0; rep < opts.reps; ++rep) one_rep(rep);
#endif
    } else {
        for (int rep = 0; rep < opts.reps; ++rep) one_rep(rep);
    }

    SimulationResult result;
    result.density = d.name();
    result.n = n;
    result.reps = opts.reps;
    result.seed = opts.seed;
    result.solver_failures = failures.load();
    result.valid = static_cast<double>(result.solver_failures) <=
                   opts.failure_threshold * static_cast<double>(opts.reps);

    result.scaled_sorted.reserve(scaled.size());
    for (double y : scaled) {
        if (!std::isnan(y)) result.scaled_sorted.push_back(y);
    }
    if (result.scaled_sorted.size() < 2) {
        throw SolverFailure("all replications failed; nothing to summarize");
    }
    std::sort(result.scaled_sorted.begin(), result.scaled_sorted.end());

    result.bandwidth = silverman_bandwidth(result.scaled_sorted);
    const double m = static_cast<double>(result.scaled_sorted.size());
    for (double v : levels) {
        QuantileRow row;
        row.v = v;
        row.raw_q = type7_quantile(result.scaled_sorted, v);
        if (opts.bootstrap_se) {
            row.se = bootstrap_se(result.scaled_sorted, v, opts.seed, opts.bootstrap_b);
        } else {
            double f = kde_density(result.scaled_sorted, result.bandwidth, row.raw_q);
            row.se = std::sqrt(v * (1.0 - v) / m) / f;
        }
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace

SimulationResult simulate_gn(const LocationDensity& d, int n, const SimOptions& opts) {
    return run_reps(d, n, opts, true);
}

SimulationResult simulate_gn_serial(const LocationDensity& d, int n, const SimOptions& opts) {
    return run_reps(d, n, opts, false);
}

CenteredQuantile centered_quantile(const SimulationResult& r, double v) {
    const QuantileRow& row_v = r.row(v);
    const QuantileRow& row_m = r.row(0.5);
    CenteredQuantile out;
    out.value = row_v.raw_q - row_m.raw_q;
    if (std::fabs(v - 0.5) <= 1e-12) return out;

    // var(q_a - q_b) with the order-statistic covariance
    // cov(q_a, q_b) = a(1-b)/(m f(q_a) f(q_b)) for a <= b.
    double a = std::min(v, 0.5), b = std::max(v, 0.5);
    double m = static_cast<double>(r.scaled_sorted.size());
    double fa = kde_density(r.scaled_sorted, r.bandwidth,
                            std::fabs(a - 0.5) <= 1e-12 ? row_m.raw_q : row_v.raw_q);
    double fb = kde_density(r.scaled_sorted, r.bandwidth,
                            std::fabs(b - 0.5) <= 1e-12 ? row_m.raw_q : row_v.raw_q);
    double var = a * (1.0 - a) / (m * fa * fa) + b * (1.0 - b) / (m * fb * fb) -
                 2.0 * a * (1.0 - b) / (m * fa * fb);
    out.se = std::sqrt(std::max(var, 0.0));
    return out;
}

double quantile_expansion(const moments::ScoreMoments& m, double v, double n) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("quantile level outside (0,1)");
    if (!(n >= 1.0)) throw ConfigError("sample size must be >= 1");
    const auto& g = catalog::authoritative(catalog::EquationId::eq2);
    return g.evaluate(m.values(), inv_normal_cdf(v), 0.0, n);
}

GapEstimate empirical_gap(const SimulationResult& r, const moments::ScoreMoments& m,
                          double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha outside (0,1)");
    double v = 1.0 - alpha / 2.0;
    CenteredQuantile emp = centered_quantile(r, v);
    GapEstimate out;
    out.empirical = emp.value;
    out.se = emp.se;
    const auto& eps_v = catalog::authoritative(catalog::EquationId::eq6);
    out.expansion =
        eps_v.evaluate(m.values(), inv_normal_cdf(v), 0.0, static_cast<double>(r.n));
    out.gap = out.empirical - out.expansion;
    return out;
}

std::string to_csv(const SimulationResult& r, const moments::ScoreMoments& m) {
    auto field = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.12g", x);
        return std::string(buf);
    };
    std::string quoted = "\"";
    for (char c : r.density) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';

    std::string csv = "density,n,reps,seed,v,empirical_q,se,expansion_q,gap\n";
    for (const auto& row : r.rows) {
        CenteredQuantile emp = centered_quantile(r, row.v);
        double expansion = quantile_expansion(m, row.v, static_cast<double>(r.n));
        csv += quoted + ',' + std::to_string(r.n) + ',' + std::to_string(r.reps) + ',' +
               std::to_string(r.seed) + ',' + field(row.v) + ',' + field(emp.value) + ',' +
               field(emp.se) + ',' + field(expansion) + ',' + field(emp.value - expansion) +
               '\n';
    }
    return csv;
}

}  // namespace hoexp::simulate
