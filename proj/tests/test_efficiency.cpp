#include <cmath>
#include <initializer_list>
#include <string>

#include <doctest.h>

#include "hoexp/density_json.hpp"
#include "hoexp/efficiency.hpp"
#include "hoexp/errors.hpp"
#include "hoexp/moments.hpp"
#include "hoexp/normal.hpp"

using hoexp::ConfigError;
using hoexp::inv_normal_cdf;
using hoexp::normal_cdf;
using hoexp::density::builtin_density;
using hoexp::moments::compute_moments;
using hoexp::moments::ScoreMoments;
using namespace hoexp::efficiency;

namespace {

ScoreMoments fake_moments(double eta2, double eta3, double eta4, double eta5 = 0.0,
                          double eta6 = 0.0) {
    ScoreMoments m;
    m.eta2.value = eta2;
    m.eta3.value = eta3;
    m.eta4.value = eta4;
    m.eta5.value = eta5;
    m.eta6.value = eta6;
    m.fisher.value = 1.0;
    m.w.value = hoexp::moments::compute_w(eta2, eta3, eta4);
    return m;
}

}  // namespace

TEST_SUITE("efficiency") {

TEST_CASE("third-order gap vanishes for gaussian moments") {
    ScoreMoments gauss = fake_moments(2.0, 0.0, 3.0);
    for (double alpha : {0.01, 0.05, 0.32}) {
        for (double n : {1.0, 25.0, 400.0}) {
            CHECK(third_order_gap(gauss, alpha, n) == 0.0);
        }
    }
}

TEST_CASE("third-order gap vanishes when W is zero") {
    // eta3 nonzero but eta4 tuned so W = 1 - eta2 + eta4/3 + eta3^2/4 = 0
    double eta2 = 1.7, eta3 = -0.4;
    double eta4 = 3.0 * (eta2 - 1.0 - eta3 * eta3 / 4.0);
    ScoreMoments m = fake_moments(eta2, eta3, eta4);
    CHECK(std::fabs(m.w.value) < 1e-15);
    CHECK(std::fabs(third_order_gap(m, 0.05, 25.0)) < 1e-12);
}

TEST_CASE("third-order gap has a root at z = 2") {
    ScoreMoments m = fake_moments(1.7, -0.5, 2.0);
    double alpha = 2.0 * (1.0 - normal_cdf(2.0));
    CHECK(std::fabs(third_order_gap(m, alpha, 25.0)) < 1e-12);
}

TEST_CASE("third-order gap matches its closed form") {
    ScoreMoments m = fake_moments(1.7, -0.5, 2.0);
    double z = inv_normal_cdf(0.975);
    double closed = (m.eta3.value / 48.0) * m.w.value * (z * z * z * z - 4.0 * z * z) /
                    std::pow(25.0, 1.5);
    CHECK(third_order_gap(m, 0.05, 25.0) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(closed != 0.0);
}

TEST_CASE("third-order gap scales exactly as n^{-3/2}") {
    ScoreMoments m = fake_moments(1.7, -0.5, 2.0);
    for (double n : {4.0, 25.0, 1024.0}) {
        double ratio = third_order_gap(m, 0.05, n) / third_order_gap(m, 0.05, 4.0 * n);
        CHECK(ratio == doctest::Approx(8.0).epsilon(1e-12));
    }
}

TEST_CASE("normal quantile round trip on a probability grid") {
    for (int i = 0; i <= 1000; ++i) {
        double p = 1e-6 + (1.0 - 2e-6) * i / 1000.0;
        CHECK(std::fabs(normal_cdf(inv_normal_cdf(p)) - p) <= 1e-12);
    }
}

TEST_CASE("report for the gaussian") {
    auto rep = build_report(builtin_density("gaussian"), {0.05, 0.1}, {25.0, 100.0});
    CHECK(rep.density == "gaussian(0,1)");
    CHECK(rep.w_pass);
    CHECK(rep.algebra_ok);
    REQUIRE(rep.cells.size() == 4);
    CHECK(rep.simulation.empty());

    for (const auto& c : rep.cells) {
        CHECK(c.z == doctest::Approx(inv_normal_cdf(1.0 - c.alpha / 2.0)).epsilon(1e-12));
        // every correction carries eta3, eta5, eta6, or W: all ~0 here
        CHECK(c.eps_v == doctest::Approx(c.z).epsilon(1e-8));
        CHECK(c.g_expansion == doctest::Approx(c.z).epsilon(1e-8));
        CHECK(std::fabs(c.third_order) < 1e-10);
        CHECK(std::fabs(c.adjusted_gap) < 1e-10);
        for (double s : c.two_sided) CHECK(std::fabs(s) < 1e-10);
    }

    CHECK(rep.algebra_summary.find("EQ6") != std::string::npos);
    CHECK(rep.algebra_summary.find("DIFFERS") != std::string::npos);
    REQUIRE(!rep.algebra_differs.empty());
    CHECK(rep.algebra_differs.front() == "EQ6");
}

TEST_CASE("report for the normalized logistic") {
    auto rep = build_report(builtin_density("logistic"), {0.05}, {25.0});
    REQUIRE(rep.cells.size() == 1);
    const auto& c = rep.cells.front();
    double z = inv_normal_cdf(0.975);
    double expected = z + (0.05 * z * z * z - 0.05 * z) / 25.0;
    CHECK(c.g_expansion == doctest::Approx(expected).epsilon(1e-7));
    // symmetric density: eq2 and the one-sided bound agree through n^{-3/2}
    CHECK(c.eps_v == doctest::Approx(c.g_expansion).epsilon(1e-10));
    CHECK(std::fabs(c.third_order) < 1e-9);
    CHECK(rep.moments.w.value == doctest::Approx(-0.2).epsilon(1e-7));
    CHECK(rep.w_pass);
}

TEST_CASE("skewed density produces a nonzero third-order gap with the predicted sign") {
    auto rep = build_report(builtin_density("skew-normal"), {0.05}, {100.0});
    const auto& c = rep.cells.front();
    const auto& m = rep.moments;
    CHECK(c.third_order != 0.0);
    double z = c.z;
    double sign = m.eta3.value * m.w.value * (z * z * z * z - 4.0 * z * z);
    CHECK(std::signbit(c.third_order) == std::signbit(sign));
    // the one-sided gap survives at order three while the symmetric two-sided
    // strata all cancel
    CHECK(std::fabs(c.g_expansion - c.eps_v) ==
          doctest::Approx(std::fabs(c.third_order)).epsilon(1e-9));
    for (double s : c.two_sided) CHECK(std::fabs(s) < 1e-12);
    CHECK(std::fabs(c.adjusted_gap) < 1e-12);
}

TEST_CASE("report validation and error context") {
    auto d = builtin_density("gaussian");
    CHECK_THROWS_AS(build_report(d, {}, {25.0}), ConfigError);
    CHECK_THROWS_AS(build_report(d, {0.05}, {}), ConfigError);
    CHECK_THROWS_AS(build_report(d, {1.5}, {25.0}), ConfigError);
    CHECK_THROWS_AS(build_report(d, {0.05}, {0.5}), ConfigError);

    hoexp::simulate::SimOptions sim;
    sim.reps = 1000;
    try {
        build_report(d, {0.05}, {12.5}, sim);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("n=12.5") != std::string::npos);
    }
}

TEST_CASE("report with simulation rows") {
    hoexp::simulate::SimOptions sim;
    sim.reps = 2000;
    sim.seed = 31;
    auto rep = build_report(builtin_density("gaussian"), {0.05}, {10.0}, sim);
    REQUIRE(rep.simulation.size() == 1);
    const auto& row = rep.simulation.front();
    CHECK(row.n == 10);
    CHECK(row.valid);
    CHECK(row.solver_failures == 0);
    CHECK(row.gap.se > 0.0);
    CHECK(std::fabs(row.gap.gap) <= 3.0 * row.gap.se);
    CHECK(row.gap.expansion == doctest::Approx(inv_normal_cdf(0.975)).epsilon(1e-9));
}

TEST_CASE("renderings are deterministic and carry the schema") {
    auto rep = build_report(builtin_density("logistic"), {0.05, 0.1}, {16.0, 64.0, 256.0});
    auto j = to_json(rep);
    CHECK(j.at("schema_version").get<int>() == 1);
    CHECK(j.at("density").get<std::string>() == rep.density);
    CHECK(j.at("moments").at("W").at("pass").get<bool>());
    CHECK(j.at("cells").size() == 6);
    CHECK(j.at("algebra").at("all_recipes_ok").get<bool>());
    CHECK(j.dump() == to_json(rep).dump());

    std::string text = to_text(rep);
    CHECK(text.find("density: ") != std::string::npos);
    CHECK(text.find("W <= 0: pass") != std::string::npos);
    CHECK(text.find("alpha") != std::string::npos);
    CHECK(text == to_text(rep));

    std::string csv = plot_csv(rep, 0.05);
    CHECK(csv.rfind("n,gap,order3_prediction\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK_THROWS_AS(plot_csv(rep, 0.2), ConfigError);

    // the plotted gap column is the full-expansion difference, which must
    // reproduce the order-3 prediction for every n
    for (const auto& c : rep.cells) {
        CHECK(c.g_expansion - c.eps_v == doctest::Approx(c.third_order).epsilon(1e-9));
    }
}

}  // TEST_SUITE
