#include "hoexp/config.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "hoexp/density_json.hpp"
#include "hoexp/errors.hpp"

namespace hoexp::config {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& key, const char* want, const json& got) {
    throw ConfigError("config field \"" + key + "\" must be " + want + ", got " +
                      got.dump());
}

double as_number(const json& j, const std::string& key) {
    if (!j.is_number()) bad_field(key, "a number", j);
    return j.get<double>();
}

long as_integer(const json& j, const std::string& key) {
    if (!j.is_number_integer()) bad_field(key, "an integer", j);
    return j.get<long>();
}

bool as_bool(const json& j, const std::string& key) {
    if (!j.is_boolean()) bad_field(key, "a boolean", j);
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& key) {
    if (!j.is_string()) bad_field(key, "a string", j);
    return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) bad_field(key, "a non-empty array of numbers", j);
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) bad_field(key, "a non-empty array of numbers", j);
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object, got " + j.dump());
    static const std::set<std::string> allowed = {
        "density",   "alphas",       "n",         "v",
        "reps",      "seed",         "threads",   "output",
        "plot_output", "equation",   "format",    "simulate",
        "bootstrap_se", "bootstrap_b", "tolerance", "failure_threshold"};
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            std::string known;
            for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
            throw ConfigError("unknown config key \"" + item.key() + "\" (known keys: " +
                              known + ")");
        }
    }

    RunConfig c;
    if (j.contains("density")) {
        const auto& d = j.at("density");
        if (!d.is_string() && !d.is_object())
            bad_field("density", "a builtin name or a density spec object", d);
        c.density = d;
    }
    if (j.contains("alphas")) c.alphas = as_number_list(j.at("alphas"), "alphas");
    if (j.contains("n")) c.ns = as_number_list(j.at("n"), "n");
    if (j.contains("v")) c.v_levels = as_number_list(j.at("v"), "v");
    if (j.contains("reps")) c.reps = as_integer(j.at("reps"), "reps");
    if (j.contains("seed")) {
        long s = as_integer(j.at("seed"), "seed");
        if (s < 0) throw ConfigError("config field \"seed\" must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("threads")) c.threads = static_cast<int>(as_integer(j.at("threads"), "threads"));
    if (j.contains("output")) c.output = as_string(j.at("output"), "output");
    if (j.contains("plot_output")) c.plot_output = as_string(j.at("plot_output"), "plot_output");
    if (j.contains("equation")) c.equation = as_string(j.at("equation"), "equation");
    if (j.contains("format")) {
        c.format = as_string(j.at("format"), "format");
        if (c.format != "json" && c.format != "text")
            throw ConfigError("config field \"format\" must be \"json\" or \"text\"");
    }
    if (j.contains("simulate")) c.simulate = as_bool(j.at("simulate"), "simulate");
    if (j.contains("bootstrap_se")) c.bootstrap_se = as_bool(j.at("bootstrap_se"), "bootstrap_se");
    if (j.contains("bootstrap_b"))
        c.bootstrap_b = static_cast<int>(as_integer(j.at("bootstrap_b"), "bootstrap_b"));
    if (j.contains("tolerance")) c.tolerance = as_number(j.at("tolerance"), "tolerance");
    if (j.contains("failure_threshold"))
        c.failure_threshold = as_number(j.at("failure_threshold"), "failure_threshold");
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    j["density"] = c.density;
    j["alphas"] = c.alphas;
    j["n"] = c.ns;
    j["v"] = c.v_levels;
    j["reps"] = c.reps;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["output"] = c.output;
    j["plot_output"] = c.plot_output;
    j["equation"] = c.equation;
    j["format"] = c.format;
    j["simulate"] = c.simulate;
    j["bootstrap_se"] = c.bootstrap_se;
    j["bootstrap_b"] = c.bootstrap_b;
    j["tolerance"] = c.tolerance;
    j["failure_threshold"] = c.failure_threshold;
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return config_from_json(j);
}

density::LocationDensity build_density(const RunConfig& c) {
    if (c.density.is_string()) return density::builtin_density(c.density.get<std::string>());
    return density::density_from_json(c.density);
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    fs::path tmp = (dir.empty() ? fs::path(".") : dir) /
                   (target.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write output file: " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ConfigError("write failed for output file: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move output into place: " + path);
    }
}

}  // namespace hoexp::config
