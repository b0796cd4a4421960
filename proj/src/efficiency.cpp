#include "hoexp/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hoexp/catalog.hpp"
#include "hoexp/errors.hpp"
#include "hoexp/normal.hpp"

namespace hoexp::efficiency {

namespace {

using algebra::MomentValues;
using catalog::EquationId;

double upper_z(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha outside (0,1)");
    return inv_normal_cdf(1.0 - alpha / 2.0);
}

// Rethrows module errors with the failing cell identified, keeping the type
// (and therefore the CLI exit code) intact.
template <typename Fn>
auto with_context(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const SolverFailure& e) {
        throw SolverFailure(where + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(where + ": " + e.what());
    }
}

std::string fmt(const char* spec, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, x);
    return buf;
}

}  // namespace

double third_order_gap(const moments::ScoreMoments& m, double alpha, double n) {
    if (!(n >= 1.0)) throw ConfigError("n must be >= 1");
    double z = upper_z(alpha);
    return catalog::authoritative(EquationId::eq8).evaluate(m.values(), z, 0.0, n);
}

EfficiencyReport build_report(const density::LocationDensity& d,
                              const std::vector<double>& alphas, const std::vector<double>& ns,
                              const std::optional<simulate::SimOptions>& sim) {
    if (alphas.empty()) throw ConfigError("alpha list is empty");
    if (ns.empty()) throw ConfigError("n list is empty");
    for (double alpha : alphas) upper_z(alpha);
    for (double n : ns) {
        if (!(n >= 1.0)) throw ConfigError("every n must be >= 1");
    }

    EfficiencyReport rep;
    rep.density = d.name();
    rep.moments = with_context("density " + d.name(),
                               [&] { return moments::compute_moments(d); });
    rep.w_pass = rep.moments.w.value <= 1e-7 + rep.moments.w.error;
    rep.algebra_summary = catalog::verify_algebra_report();
    rep.algebra_ok = catalog::all_recipes_ok();
    for (const auto& entry : catalog::all_entries()) {
        if (entry.derived && !entry.matches) {
            rep.algebra_differs.emplace_back(catalog::to_string(entry.id));
        }
    }

    const MomentValues mv = rep.moments.values();
    const auto& eps_v = catalog::authoritative(EquationId::eq6);
    const auto& g_exp = catalog::authoritative(EquationId::eq2);
    const auto& two_sided = catalog::authoritative(EquationId::eq12);
    const auto& adjusted = catalog::adjusted_epsilon_v().adjusted;

    for (double alpha : alphas) {
        for (double n : ns) {
            std::ostringstream where;
            where << "cell alpha=" << alpha << ", n=" << n;
            with_context(where.str(), [&] {
                Cell cell;
                cell.alpha = alpha;
                cell.n = n;
                cell.z = upper_z(alpha);
                cell.eps_v = eps_v.evaluate(mv, cell.z, 0.0, n);
                cell.g_expansion = g_exp.evaluate(mv, cell.z, 0.0, n);
                cell.third_order = third_order_gap(rep.moments, alpha, n);
                for (int k = 0; k < 4; ++k) {
                    cell.two_sided[static_cast<std::size_t>(k)] =
                        two_sided.stratum(k).evaluate(mv, cell.z, -cell.z, n);
                }
                cell.adjusted_gap =
                    cell.g_expansion - adjusted.evaluate(mv, cell.z, -cell.z, n);
                rep.cells.push_back(cell);
            });
        }
    }

    if (sim) {
        simulate::SimOptions opts = *sim;
        opts.v_levels = {0.5};
        for (double alpha : alphas) opts.v_levels.push_back(1.0 - alpha / 2.0);
        std::uint64_t base_seed = opts.seed;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            double n = ns[i];
            if (std::fabs(n - std::round(n)) > 1e-9) {
                std::ostringstream msg;
                msg << "simulation requires integer sample sizes, got n=" << n;
                throw ConfigError(msg.str());
            }
            std::ostringstream where;
            where << "simulation n=" << n;
            with_context(where.str(), [&] {
                opts.seed = base_seed + i;
                auto result =
                    simulate::simulate_gn(d, static_cast<int>(std::round(n)), opts);
                for (double alpha : alphas) {
                    SimulationRow row;
                    row.alpha = alpha;
                    row.n = result.n;
                    row.gap = simulate::empirical_gap(result, rep.moments, alpha);
                    row.solver_failures = result.solver_failures;
                    row.valid = result.valid;
                    rep.simulation.push_back(row);
                }
            });
        }
    }
    return rep;
}

nlohmann::json to_json(const EfficiencyReport& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["density"] = r.density;
    j["moments"] = moments::to_json(r.moments);
    j["w_pass"] = r.w_pass;
    j["algebra"] = {{"all_recipes_ok", r.algebra_ok},
                    {"transcription_differs", r.algebra_differs}};
    j["cells"] = nlohmann::json::array();
    for (const auto& c : r.cells) {
        j["cells"].push_back({{"alpha", c.alpha},
                              {"n", c.n},
                              {"z", c.z},
                              {"eps_v", c.eps_v},
                              {"g_expansion", c.g_expansion},
                              {"third_order_gap", c.third_order},
                              {"two_sided_strata", c.two_sided},
                              {"adjusted_gap", c.adjusted_gap}});
    }
    j["simulation"] = nlohmann::json::array();
    for (const auto& s : r.simulation) {
        j["simulation"].push_back({{"alpha", s.alpha},
                                   {"n", s.n},
                                   {"empirical", s.gap.empirical},
                                   {"expansion", s.gap.expansion},
                                   {"gap", s.gap.gap},
                                   {"se", s.gap.se},
                                   {"solver_failures", s.solver_failures},
                                   {"valid", s.valid}});
    }
    return j;
}

std::string to_text(const EfficiencyReport& r) {
    std::ostringstream out;
    out << "density: " << r.density << "\n";
    auto line = [&](const char* name, const moments::FunctionalValue& f) {
        out << "  " << name << " = " << fmt("%-12.9g", f.value) << " +- "
            << fmt("%.3g", f.error) << "\n";
    };
    line("fisher", r.moments.fisher);
    line("eta2  ", r.moments.eta2);
    line("eta3  ", r.moments.eta3);
    line("eta4  ", r.moments.eta4);
    line("eta5  ", r.moments.eta5);
    line("eta6  ", r.moments.eta6);
    line("W     ", r.moments.w);
    out << "  W <= 0: " << (r.w_pass ? "pass" : "FAIL") << "\n";
    out << "algebra: " << (r.algebra_ok ? "recipes consistent" : "RECIPE FAILURE");
    if (!r.algebra_differs.empty()) {
        out << "; differs from print:";
        for (const auto& id : r.algebra_differs) out << " " << id;
    }
    out << "\n\n";

    out << "alpha      n          z          eps_v        G_expansion  gap3         "
           "two_sided    adjusted\n";
    for (const auto& c : r.cells) {
        double two_max = 0.0;
        for (double s : c.two_sided) two_max = std::max(two_max, std::fabs(s));
        out << fmt("%-10.4g", c.alpha) << " " << fmt("%-10.6g", c.n) << " "
            << fmt("%-10.6f", c.z) << " " << fmt("%-12.8g", c.eps_v) << " "
            << fmt("%-12.8g", c.g_expansion) << " " << fmt("%-12.4g", c.third_order) << " "
            << fmt("%-12.4g", two_max) << " " << fmt("%-12.4g", c.adjusted_gap) << "\n";
    }

    if (!r.simulation.empty()) {
        out << "\nsimulation cross-check:\n";
        out << "alpha      n          empirical    expansion    gap          se           "
               "failures  valid\n";
        for (const auto& s : r.simulation) {
            char head[32];
            std::snprintf(head, sizeof(head), "%-10d ", s.n);
            char tail[32];
            std::snprintf(tail, sizeof(tail), "%-9ld ", s.solver_failures);
            out << fmt("%-10.4g", s.alpha) << " " << head << fmt("%-12.6g", s.gap.empirical)
                << " " << fmt("%-12.6g", s.gap.expansion) << " " << fmt("%-12.4g", s.gap.gap)
                << " " << fmt("%-12.4g", s.gap.se) << " " << tail
                << (s.valid ? "yes" : "NO") << "\n";
        }
    }
    return out.str();
}

std::string plot_csv(const EfficiencyReport& r, double alpha) {
    std::string csv = "n,gap,order3_prediction\n";
    bool any = false;
    for (const auto& c : r.cells) {
        if (std::fabs(c.alpha - alpha) > 1e-12) continue;
        any = true;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", c.n,
                      c.g_expansion - c.eps_v, c.third_order);
        csv += buf;
    }
    if (!any) throw ConfigError("no cells for the requested alpha");
    return csv;
}

}  // namespace hoexp::efficiency
