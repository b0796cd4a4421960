#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "hoexp/density.hpp"
#include "hoexp/density_json.hpp"
#include "hoexp/errors.hpp"
#include "hoexp/moments.hpp"
#include "hoexp/normal.hpp"
#include "hoexp/rng.hpp"
#include "hoexp/simulate.hpp"

using hoexp::ConfigError;
using hoexp::inv_normal_cdf;
using hoexp::normal_cdf;
using hoexp::NumericError;
using hoexp::SolverFailure;
using hoexp::density::builtin_density;
using hoexp::density::LocationDensity;
using hoexp::density::make_gaussian;
using hoexp::moments::compute_moments;
using namespace hoexp::simulate;

TEST_SUITE("simulate") {

TEST_CASE("interpolated quantiles") {
    std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(type7_quantile(xs, 0.0) == 1.0);
    CHECK(type7_quantile(xs, 0.25) == 2.0);
    CHECK(type7_quantile(xs, 0.5) == 3.0);
    CHECK(type7_quantile(xs, 0.875) == 4.5);
    CHECK(type7_quantile(xs, 1.0) == 5.0);
    CHECK_THROWS_AS(type7_quantile(xs, 1.5), ConfigError);
}

TEST_CASE("gaussian mle equals the sample mean") {
    LocationDensity d = builtin_density("gaussian");
    auto xs = d.sample(50, 11);
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / 50.0;
    CHECK(std::fabs(mle_solve(xs, d) - mean) < 1e-10);
}

TEST_CASE("single observation centers a symmetric density") {
    std::vector<double> xs = {2.7};
    CHECK(std::fabs(mle_solve(xs, builtin_density("logistic")) - 2.7) < 1e-9);
    CHECK(std::fabs(mle_solve(xs, builtin_density("gaussian")) - 2.7) < 1e-9);
}

TEST_CASE("logistic location recovery at the asymptotic rate") {
    LocationDensity d = builtin_density("logistic");
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto xs = d.sample(50, seed);
        for (auto& x : xs) x += 3.0;
        if (std::fabs(mle_solve(xs, d) - 3.0) <= 3.0 / std::sqrt(50.0)) ++hits;
    }
    CHECK(hits >= 990);
}

TEST_CASE("shift equivariance on dyadically quantized samples") {
    LocationDensity d = builtin_density("logistic");
    const double scale = 1048576.0;  // 2^20; shifted additions stay exact
    const double c = 1024.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto xs = d.sample(21, seed);
        for (auto& x : xs) x = std::round(x * scale) / scale;
        auto shifted = xs;
        for (auto& x : shifted) x += c;
        double theta = mle_solve(xs, d);
        double theta_shifted = mle_solve(shifted, d);
        // the solver works in residual coordinates; only the final
        // median + delta recombination can round, bounded by ulp(c)
        CHECK(std::fabs((theta_shifted - c) - theta) <= 1e-12);
    }
}

TEST_CASE("samples wider than the working support fail loudly") {
    std::vector<double> xs = {-9.0, 9.0};
    CHECK_THROWS_AS(mle_solve(xs, LocationDensity(make_gaussian(0.0, 1.0))), SolverFailure);
    CHECK_THROWS_AS(mle_solve({}, builtin_density("gaussian")), ConfigError);
}

TEST_CASE("simulation is deterministic and thread-count independent") {
    LocationDensity d = builtin_density("gaussian");
    SimOptions o;
    o.reps = 1000;
    o.seed = 5;
    o.v_levels = {0.5, 0.9};
    auto a = simulate_gn(d, 10, o);
    auto b = simulate_gn(d, 10, o);
    auto serial = simulate_gn_serial(d, 10, o);
    SimOptions o3 = o;
    o3.threads = 3;
    auto threaded = simulate_gn(d, 10, o3);

    CHECK(a.scaled_sorted == b.scaled_sorted);
    CHECK(a.scaled_sorted == serial.scaled_sorted);
    CHECK(a.scaled_sorted == threaded.scaled_sorted);
    REQUIRE(a.rows.size() == serial.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].raw_q == serial.rows[i].raw_q);
        CHECK(a.rows[i].se == serial.rows[i].se);
    }
    CHECK(a.solver_failures == 0);
    CHECK(a.valid);

    auto m = compute_moments(d);
    CHECK(to_csv(a, m) == to_csv(serial, m));
}

TEST_CASE("gaussian simulation reproduces exact normality") {
    LocationDensity d = builtin_density("gaussian");
    SimOptions o;
    o.reps = 20000;
    o.seed = 42;
    o.v_levels = {0.5, 0.9, 0.975};
    auto r = simulate_gn(d, 10, o);
    CHECK(r.solver_failures == 0);

    CHECK(ks_statistic(r.scaled_sorted, [](double y) { return normal_cdf(y); }) <
          1.9495 / std::sqrt(static_cast<double>(r.scaled_sorted.size())));

    for (double v : {0.9, 0.975}) {
        auto cq = centered_quantile(r, v);
        CHECK(cq.se > 0.0);
        CHECK(cq.se < 0.05);
        CHECK(std::fabs(cq.value - inv_normal_cdf(v)) <= 3.0 * cq.se);
    }

    auto gap = empirical_gap(r, compute_moments(d), 0.05);
    CHECK(gap.expansion == doctest::Approx(inv_normal_cdf(0.975)).epsilon(1e-9));
    CHECK(std::fabs(gap.gap) <= 3.0 * gap.se);
}

TEST_CASE("quantile rows are monotone in v") {
    SimOptions o;
    o.reps = 2000;
    o.seed = 9;
    o.v_levels = {0.1, 0.25, 0.5, 0.75, 0.9};
    auto r = simulate_gn(builtin_density("gaussian"), 5, o);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].v > r.rows[i - 1].v);
        CHECK(r.rows[i].raw_q >= r.rows[i - 1].raw_q);
    }
}

TEST_CASE("standard errors shrink like inverse root reps") {
    LocationDensity d = builtin_density("gaussian");
    SimOptions small;
    small.reps = 20000;
    small.seed = 3;
    small.v_levels = {0.975};
    SimOptions big = small;
    big.reps = 80000;
    double se_small = simulate_gn(d, 5, small).row(0.975).se;
    double se_big = simulate_gn(d, 5, big).row(0.975).se;
    double ratio = se_small / se_big;  // 2 when SE scales as reps^{-1/2}
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("bootstrap standard errors agree with the analytic ones") {
    LocationDensity d = builtin_density("gaussian");
    SimOptions o;
    o.reps = 2000;
    o.seed = 21;
    o.v_levels = {0.9};
    auto analytic = simulate_gn(d, 5, o);
    o.bootstrap_se = true;
    o.bootstrap_b = 300;
    auto boot = simulate_gn(d, 5, o);
    CHECK(analytic.scaled_sorted == boot.scaled_sorted);
    double ratio = boot.row(0.9).se / analytic.row(0.9).se;
    CHECK(ratio > 0.7);
    CHECK(ratio < 1.4);
}

TEST_CASE("expansion prediction oracles") {
    auto mg = compute_moments(builtin_density("gaussian"));
    CHECK(quantile_expansion(mg, 0.975, 25.0) ==
          doctest::Approx(inv_normal_cdf(0.975)).epsilon(1e-9));
    CHECK(quantile_expansion(mg, 0.5, 25.0) == 0.0);

    // logistic: eta2 = eta4 = 9/5, odd moments zero, so the expansion is
    // z + ((1/20) z^3 - (1/20) z) / n and the n^{-3/2} stratum vanishes
    auto ml = compute_moments(builtin_density("logistic"));
    double z = inv_normal_cdf(0.975);
    double expected = z + (0.05 * z * z * z - 0.05 * z) / 25.0;
    CHECK(quantile_expansion(ml, 0.975, 25.0) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("logistic simulation matches the quantile expansion") {
    LocationDensity d = builtin_density("logistic");
    SimOptions o;
    o.reps = 20000;
    o.seed = 7;
    o.v_levels = {0.5, 0.975};
    auto r = simulate_gn(d, 25, o);
    CHECK(r.valid);
    auto m = compute_moments(d);
    auto cq = centered_quantile(r, 0.975);
    double predicted = quantile_expansion(m, 0.975, 25.0);
    CHECK(std::fabs(cq.value - predicted) <= 3.0 * cq.se);

    auto gap = empirical_gap(r, m, 0.05);
    CHECK(std::fabs(gap.gap) <= 3.0 * gap.se);
}

TEST_CASE("skewed density stays consistent with the derived expansion") {
    LocationDensity d = builtin_density("skew-normal");
    SimOptions o;
    o.reps = 3000;
    o.seed = 13;
    o.v_levels = {0.5, 0.975};
    auto r = simulate_gn(d, 50, o);
    CHECK(r.valid);
    auto gap = empirical_gap(r, compute_moments(d), 0.05);
    CHECK(std::fabs(gap.gap) <= 3.0 * gap.se);
}

TEST_CASE("input validation") {
    LocationDensity d = builtin_density("gaussian");
    SimOptions o;
    o.reps = 999;
    CHECK_THROWS_AS(simulate_gn(d, 10, o), ConfigError);
    o.reps = 1000;
    o.v_levels = {0.5, 1.5};
    CHECK_THROWS_AS(simulate_gn(d, 10, o), ConfigError);
    o.v_levels = {0.5};
    CHECK_THROWS_AS(simulate_gn(d, 0, o), ConfigError);
    CHECK_THROWS_AS(simulate_gn(LocationDensity(make_gaussian(0.0, 2.0)), 10, o),
                    NumericError);

    SimOptions ok;
    ok.reps = 1000;
    ok.seed = 5;
    auto r = simulate_gn(d, 5, ok);
    CHECK_THROWS_AS(r.row(0.33), ConfigError);
    CHECK_THROWS_AS(empirical_gap(r, compute_moments(d), 0.0), ConfigError);
    CHECK_THROWS_AS(empirical_gap(r, compute_moments(d), 0.3), ConfigError);
}

TEST_CASE("csv output") {
    LocationDensity d = builtin_density("gaussian");
    SimOptions o;
    o.reps = 1000;
    o.seed = 2;
    o.v_levels = {0.5, 0.9};
    auto r = simulate_gn(d, 5, o);
    auto m = compute_moments(d);
    std::string csv = to_csv(r, m);
    CHECK(csv.rfind("density,n,reps,seed,v,empirical_q,se,expansion_q,gap\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("\"gaussian(0,1)\",5,1000,2,0.5,0,0,0,0\n") != std::string::npos);
    CHECK(csv == to_csv(r, m));
}

}  // TEST_SUITE
