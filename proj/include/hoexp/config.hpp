#pragma once

// Run configuration shared by the CLI subcommands. A config file is a flat
// JSON object with the fields below, all optional; command-line flags
// override whatever the file supplies. Unknown keys are rejected so typos
// surface immediately, and to_json(config_from_json(j)) is stable.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoexp/density.hpp"

namespace hoexp::config {

struct RunConfig {
    // Builtin name ("gaussian", ...) or a full density spec object.
    nlohmann::json density = "gaussian";
    std::vector<double> alphas{0.05};
    std::vector<double> ns{25.0, 100.0};
    std::vector<double> v_levels{0.5, 0.975};
    long reps = 10000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = library decides
    std::string output;       // "" = stdout
    std::string plot_output;  // report: optional gap-vs-n CSV path
    std::string equation = "EQ2";  // expand: catalog entry to evaluate
    std::string format = "json";   // report: "json" or "text"
    bool simulate = false;         // report: attach Monte Carlo rows
    bool bootstrap_se = false;
    int bootstrap_b = 500;
    double tolerance = 1e-6;  // quadrature / Fisher acceptance tolerance
    double failure_threshold = 1e-4;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

// Parse a config file; I/O or JSON syntax problems become ConfigError.
RunConfig load_config(const std::string& path);

// Resolve the density field: builtin shorthand or inline spec.
density::LocationDensity build_density(const RunConfig& c);

// Write via a temp file in the same directory plus rename, so readers never
// observe partial output.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace hoexp::config
