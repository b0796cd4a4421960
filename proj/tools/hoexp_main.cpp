// Command-line front end: moments, expand, verify-algebra, simulate, gap,
// report. A JSON config file supplies defaults, flags override it, and all
// outputs are reproducible for a fixed seed (independent of --threads).

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hoexp/catalog.hpp"
#include "hoexp/config.hpp"
#include "hoexp/density_json.hpp"
#include "hoexp/efficiency.hpp"
#include "hoexp/errors.hpp"
#include "hoexp/moments.hpp"
#include "hoexp/normal.hpp"
#include "hoexp/simulate.hpp"

namespace {

using hoexp::config::RunConfig;
using nlohmann::json;

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitSolver = 3;

// Flags land here only when the user typed them, so file values survive
// anything left untouched.
struct Overrides {
    std::string config_path;
    std::string density;
    std::vector<double> alphas;
    std::vector<double> ns;
    std::vector<double> vs;
    long reps = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    double tolerance = 0;
    double failure_threshold = 0;
    std::string output;

    CLI::Option* opt_config = nullptr;
    CLI::Option* opt_density = nullptr;
    CLI::Option* opt_alphas = nullptr;
    CLI::Option* opt_ns = nullptr;
    CLI::Option* opt_vs = nullptr;
    CLI::Option* opt_reps = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_threads = nullptr;
    CLI::Option* opt_tolerance = nullptr;
    CLI::Option* opt_failure = nullptr;
    CLI::Option* opt_output = nullptr;
};

void add_common(CLI::App* cmd, Overrides& o) {
    o.opt_config = cmd->add_option("-c,--config", o.config_path,
                                   "JSON config file; flags override its values");
    o.opt_density =
        cmd->add_option("-d,--density", o.density,
                        "builtin density name or inline JSON spec (default: gaussian)");
    o.opt_seed = cmd->add_option("-s,--seed", o.seed, "RNG seed (default: 1)");
    o.opt_tolerance = cmd->add_option(
        "--tolerance", o.tolerance,
        "quadrature / Fisher-normalization acceptance tolerance (default: 1e-6)");
    o.opt_threads =
        cmd->add_option("--threads", o.threads,
                        "cap on simulation worker threads, 0 = library default; "
                        "results do not depend on this");
    o.opt_output = cmd->add_option("-o,--output", o.output,
                                   "output file (atomic write; default: stdout)");
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg;
    if (o.opt_config->count()) cfg = hoexp::config::load_config(o.config_path);
    if (o.opt_density->count()) {
        std::string d = o.density;
        if (!d.empty() && d.front() == '{') {
            try {
                cfg.density = json::parse(d);
            } catch (const json::parse_error& e) {
                throw hoexp::ConfigError(std::string("--density inline JSON: ") + e.what());
            }
        } else {
            cfg.density = d;
        }
    }
    if (o.opt_alphas && o.opt_alphas->count()) cfg.alphas = o.alphas;
    if (o.opt_ns && o.opt_ns->count()) cfg.ns = o.ns;
    if (o.opt_vs && o.opt_vs->count()) cfg.v_levels = o.vs;
    if (o.opt_reps && o.opt_reps->count()) cfg.reps = o.reps;
    if (o.opt_seed->count()) cfg.seed = o.seed;
    if (o.opt_threads->count()) cfg.threads = o.threads;
    if (o.opt_tolerance->count()) cfg.tolerance = o.tolerance;
    if (o.opt_failure && o.opt_failure->count()) cfg.failure_threshold = o.failure_threshold;
    if (o.opt_output->count()) cfg.output = o.output;
    return cfg;
}

void emit(const RunConfig& cfg, const std::string& content) {
    if (cfg.output.empty()) {
        std::cout << content;
        std::cout.flush();
    } else {
        hoexp::config::write_atomic(cfg.output, content);
    }
}

hoexp::simulate::SimOptions sim_options(const RunConfig& cfg) {
    hoexp::simulate::SimOptions opts;
    opts.v_levels = cfg.v_levels;
    opts.reps = cfg.reps;
    opts.seed = cfg.seed;
    opts.bootstrap_se = cfg.bootstrap_se;
    opts.bootstrap_b = cfg.bootstrap_b;
    opts.failure_threshold = cfg.failure_threshold;
    opts.threads = cfg.threads;
    return opts;
}

int run_moments(const RunConfig& cfg, bool checks) {
    auto d = hoexp::config::build_density(cfg);
    auto m = hoexp::moments::compute_moments(d, cfg.tolerance);
    json j;
    j["schema_version"] = 1;
    j["density"] = d.name();
    j["moments"] = hoexp::moments::to_json(m);
    if (checks) {
        j["identity"] = hoexp::moments::to_json(hoexp::moments::verify_identity(d));
        j["cauchy_schwarz"] = hoexp::moments::to_json(hoexp::moments::verify_cauchy_schwarz(d));
    }
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int run_expand(const RunConfig& cfg, CLI::Option* opt_v, CLI::Option* opt_u, double v_flag,
               double u_flag) {
    auto id = hoexp::catalog::equation_from_string(cfg.equation);
    if (!id) {
        std::string known;
        for (auto e : hoexp::catalog::kAllEquations)
            known += (known.empty() ? "" : ", ") + std::string(hoexp::catalog::to_string(e));
        throw hoexp::ConfigError("unknown equation \"" + cfg.equation + "\" (known: " +
                                 known + ")");
    }
    double alpha = cfg.alphas.front();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw hoexp::ConfigError("alpha must lie in (0,1), got " + std::to_string(alpha));
    double v = 1.0 - alpha / 2.0;
    double u = alpha / 2.0;
    if (opt_v->count()) {
        v = v_flag;
        u = 1.0 - v;
    }
    if (opt_u->count()) u = u_flag;
    if (!(v > 0.0 && v < 1.0) || !(u > 0.0 && u < 1.0))
        throw hoexp::ConfigError("v and u must lie in (0,1)");

    auto d = hoexp::config::build_density(cfg);
    auto m = hoexp::moments::compute_moments(d, cfg.tolerance);
    const auto& poly = hoexp::catalog::authoritative(*id);
    double zv = hoexp::inv_normal_cdf(v);
    double zu = hoexp::inv_normal_cdf(u);

    json j;
    j["schema_version"] = 1;
    j["density"] = d.name();
    j["equation"] = std::string(hoexp::catalog::to_string(*id));
    j["v"] = v;
    j["u"] = u;
    j["zv"] = zv;
    j["zu"] = zu;
    j["moments"] = hoexp::moments::to_json(m);
    json values = json::array();
    for (double n : cfg.ns) {
        if (!(n >= 1.0)) throw hoexp::ConfigError("n must be >= 1, got " + std::to_string(n));
        values.push_back({{"n", n}, {"value", poly.evaluate(m.values(), zv, zu, n)}});
    }
    j["values"] = values;
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int run_verify_algebra(const RunConfig& cfg) {
    emit(cfg, hoexp::catalog::verify_algebra_report());
    return hoexp::catalog::all_recipes_ok() ? 0 : kExitNumeric;
}

int run_simulate(const RunConfig& cfg) {
    auto d = hoexp::config::build_density(cfg);
    auto m = hoexp::moments::compute_moments(d, cfg.tolerance);
    auto opts = sim_options(cfg);
    std::string csv;
    bool all_valid = true;
    long total_failures = 0;
    for (std::size_t i = 0; i < cfg.ns.size(); ++i) {
        double n = cfg.ns[i];
        long ni = static_cast<long>(n);
        if (static_cast<double>(ni) != n || ni < 1)
            throw hoexp::ConfigError("simulation requires integer sample sizes, got n=" +
                                     std::to_string(n));
        auto run = opts;
        run.seed = cfg.seed + i;
        auto result = hoexp::simulate::simulate_gn(d, static_cast<int>(ni), run);
        all_valid = all_valid && result.valid;
        total_failures += result.solver_failures;
        std::string block = hoexp::simulate::to_csv(result, m);
        if (i == 0) {
            csv = block;
        } else {
            csv += block.substr(block.find('\n') + 1);
        }
    }
    emit(cfg, csv);
    if (!all_valid) {
        std::cerr << "solver-failure threshold exceeded (" << total_failures
                  << " failures across runs)\n";
        return kExitSolver;
    }
    return 0;
}

int run_gap(const RunConfig& cfg) {
    auto d = hoexp::config::build_density(cfg);
    auto m = hoexp::moments::compute_moments(d, cfg.tolerance);
    json j;
    j["schema_version"] = 1;
    j["density"] = d.name();
    j["moments"] = hoexp::moments::to_json(m);
    json gaps = json::array();
    for (double alpha : cfg.alphas) {
        for (double n : cfg.ns) {
            double z = hoexp::inv_normal_cdf(1.0 - alpha / 2.0);
            gaps.push_back({{"alpha", alpha},
                            {"n", n},
                            {"z", z},
                            {"gap", hoexp::efficiency::third_order_gap(m, alpha, n)}});
        }
    }
    j["gaps"] = gaps;
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int run_report(const RunConfig& cfg) {
    auto d = hoexp::config::build_density(cfg);
    std::optional<hoexp::simulate::SimOptions> sim;
    if (cfg.simulate) sim = sim_options(cfg);
    auto rep = hoexp::efficiency::build_report(d, cfg.alphas, cfg.ns, sim);
    if (!cfg.plot_output.empty())
        hoexp::config::write_atomic(cfg.plot_output,
                                    hoexp::efficiency::plot_csv(rep, cfg.alphas.front()));
    if (cfg.format == "text") {
        emit(cfg, hoexp::efficiency::to_text(rep));
    } else {
        emit(cfg, hoexp::efficiency::to_json(rep).dump(2) + "\n");
    }
    for (const auto& row : rep.simulation) {
        if (!row.valid) {
            std::cerr << "solver-failure threshold exceeded at n=" << row.n << " ("
                      << row.solver_failures << " failures)\n";
            return kExitSolver;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Score-moment functionals, quantile expansions and confidence-bound\n"
        "efficiency gaps for one-dimensional location models."};
    app.require_subcommand(1);

    Overrides mo, eo, vo, so, go, ro;
    bool moments_checks = false;
    double expand_v = 0, expand_u = 0;
    std::string report_plot;

    auto* cmd_moments = app.add_subcommand(
        "moments", "score-moment functionals (eta2..eta6, Fisher information, W) as JSON");
    add_common(cmd_moments, mo);
    cmd_moments->add_flag("--checks", moments_checks,
                          "also run the moment identity and the Cauchy-Schwarz bound");

    auto* cmd_expand =
        app.add_subcommand("expand", "evaluate a catalog expansion at given levels and n");
    add_common(cmd_expand, eo);
    eo.opt_alphas = cmd_expand->add_option(
        "-a,--alpha", eo.alphas, "two-sided level; sets v=1-alpha/2, u=alpha/2 (default: 0.05)");
    eo.opt_ns = cmd_expand->add_option("-n", eo.ns, "sample sizes (default: 25 100)");
    std::string expand_equation;
    auto* opt_equation = cmd_expand->add_option(
        "-e,--equation", expand_equation, "catalog entry to evaluate (default: EQ2)");
    auto* opt_v = cmd_expand->add_option("--v", expand_v, "upper level v in (0,1); overrides alpha");
    auto* opt_u = cmd_expand->add_option("--u", expand_u, "lower level u in (0,1)");

    auto* cmd_verify = app.add_subcommand(
        "verify-algebra",
        "re-derive the expansion catalog in exact arithmetic and report "
        "MATCHES/DIFFERS per entry (diffs are findings, not failures)");
    add_common(cmd_verify, vo);

    auto* cmd_simulate = app.add_subcommand(
        "simulate", "Monte Carlo quantiles of the normalized location MLE as CSV");
    add_common(cmd_simulate, so);
    so.opt_ns = cmd_simulate->add_option("-n", so.ns, "sample sizes (default: 25 100)");
    so.opt_vs = cmd_simulate->add_option("-v", so.vs, "quantile levels (default: 0.5 0.975)");
    so.opt_reps = cmd_simulate->add_option("-r,--reps", so.reps,
                                           "Monte Carlo replications, >= 1000 (default: 10000)");
    so.opt_failure = cmd_simulate->add_option(
        "--failure-threshold", so.failure_threshold,
        "tolerated solver-failure fraction before exit 3 (default: 1e-4)");
    bool sim_bootstrap = false;
    cmd_simulate->add_flag("--bootstrap-se", sim_bootstrap,
                           "bootstrap standard errors instead of the kernel formula");

    auto* cmd_gap = app.add_subcommand(
        "gap", "third-order confidence-bound gap over an (alpha, n) grid as JSON");
    add_common(cmd_gap, go);
    go.opt_alphas = cmd_gap->add_option("-a,--alpha", go.alphas, "two-sided levels (default: 0.05)");
    go.opt_ns = cmd_gap->add_option("-n", go.ns, "sample sizes (default: 25 100)");

    auto* cmd_report = app.add_subcommand(
        "report", "full efficiency report: moments, expansion table, algebra summary");
    add_common(cmd_report, ro);
    ro.opt_alphas =
        cmd_report->add_option("-a,--alpha", ro.alphas, "two-sided levels (default: 0.05)");
    ro.opt_ns = cmd_report->add_option("-n", ro.ns, "sample sizes (default: 25 100)");
    ro.opt_reps = cmd_report->add_option("-r,--reps", ro.reps,
                                         "Monte Carlo replications when --simulate is set");
    bool report_simulate = false;
    cmd_report->add_flag("--simulate", report_simulate,
                         "attach Monte Carlo cross-check rows (one run per n)");
    std::string report_format;
    auto* opt_format =
        cmd_report->add_option("-f,--format", report_format, "output format: json or text");
    auto* opt_plot = cmd_report->add_option(
        "--plot-csv", report_plot, "also write gap-vs-n plot data (n,gap,order3_prediction) "
                                   "for the first alpha");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);  // prints help or the parse diagnostic
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (cmd_moments->parsed()) return run_moments(resolve(mo), moments_checks);
        if (cmd_expand->parsed()) {
            RunConfig cfg = resolve(eo);
            if (opt_equation->count()) cfg.equation = expand_equation;
            return run_expand(cfg, opt_v, opt_u, expand_v, expand_u);
        }
        if (cmd_verify->parsed()) return run_verify_algebra(resolve(vo));
        if (cmd_simulate->parsed()) {
            RunConfig cfg = resolve(so);
            if (sim_bootstrap) cfg.bootstrap_se = true;
            return run_simulate(cfg);
        }
        if (cmd_gap->parsed()) return run_gap(resolve(go));
        if (cmd_report->parsed()) {
            RunConfig cfg = resolve(ro);
            if (report_simulate) cfg.simulate = true;
            if (opt_format->count()) {
                if (report_format != "json" && report_format != "text")
                    throw hoexp::ConfigError("--format must be json or text");
                cfg.format = report_format;
            }
            if (opt_plot->count()) cfg.plot_output = report_plot;
            return run_report(cfg);
        }
    } catch (const hoexp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const hoexp::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const hoexp::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
