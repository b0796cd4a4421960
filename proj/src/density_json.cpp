#include "hoexp/density_json.hpp"

#include <map>
#include <set>

#include "hoexp/errors.hpp"

namespace hoexp::density {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& what) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError(what + ": unknown key \"" + key + "\"");
    }
}

double number_or(const json& params, const std::string& key, double fallback) {
    if (!params.contains(key)) return fallback;
    const json& v = params.at(key);
    if (!v.is_number()) throw ConfigError("params." + key + " must be a number");
    return v.get<double>();
}

std::shared_ptr<const Family> family_from_json(const json& spec, bool top_level);

std::shared_ptr<const Family> mixture_from_json(const json& spec) {
    if (!spec.contains("components")) throw ConfigError("mixture: missing \"components\"");
    const json& comps = spec.at("components");
    if (!comps.is_array() || comps.size() < 2) {
        throw ConfigError("mixture: \"components\" must be an array of at least two entries");
    }
    std::vector<std::pair<std::shared_ptr<const Family>, double>> parts;
    for (const json& c : comps) {
        require_object(c, "mixture component");
        reject_unknown_keys(c, {"density", "weight"}, "mixture component");
        if (!c.contains("density") || !c.contains("weight")) {
            throw ConfigError("mixture component needs \"density\" and \"weight\"");
        }
        if (!c.at("weight").is_number()) throw ConfigError("mixture weight must be a number");
        parts.emplace_back(family_from_json(c.at("density"), false),
                           c.at("weight").get<double>());
    }
    return make_mixture(std::move(parts));
}

std::shared_ptr<const Family> family_from_json(const json& spec, bool top_level) {
    require_object(spec, "density spec");
    if (!spec.contains("family") || !spec.at("family").is_string()) {
        throw ConfigError("density spec needs a string \"family\"");
    }
    const std::string family = spec.at("family").get<std::string>();

    // "normalize" and "derivatives" apply to a density as a whole, so they
    // are rejected inside mixture components.
    std::set<std::string> allowed = {"family", "params"};
    if (family == "mixture") allowed = {"family", "components"};
    if (top_level) {
        allowed.insert("normalize");
        allowed.insert("derivatives");
    }
    reject_unknown_keys(spec, allowed, "density spec");

    if (family == "mixture") return mixture_from_json(spec);

    json params = spec.value("params", json::object());
    require_object(params, "params");

    if (family == "gaussian") {
        reject_unknown_keys(params, {"mean", "sigma"}, "gaussian params");
        return make_gaussian(number_or(params, "mean", 0.0), number_or(params, "sigma", 1.0));
    }
    if (family == "logistic") {
        reject_unknown_keys(params, {"location", "scale"}, "logistic params");
        return make_logistic(number_or(params, "location", 0.0),
                             number_or(params, "scale", 1.0));
    }
    if (family == "student-t") {
        reject_unknown_keys(params, {"nu", "center", "sigma"}, "student-t params");
        return make_student_t(number_or(params, "nu", 8.0), number_or(params, "center", 0.0),
                              number_or(params, "sigma", 1.0));
    }
    if (family == "skew-normal") {
        reject_unknown_keys(params, {"lambda", "location", "sigma"}, "skew-normal params");
        return make_skew_normal(number_or(params, "lambda", 2.0),
                                number_or(params, "location", 0.0),
                                number_or(params, "sigma", 1.0));
    }
    throw ConfigError("unknown density family \"" + family + "\"");
}

}  // namespace

LocationDensity density_from_json(const json& spec) {
    auto family = family_from_json(spec, true);
    if (spec.contains("derivatives")) {
        const json& d = spec.at("derivatives");
        if (!d.is_string() || (d != "closed-form" && d != "fd")) {
            throw ConfigError("\"derivatives\" must be \"closed-form\" or \"fd\"");
        }
        if (d == "fd") family = make_fd_fallback(std::move(family));
    }
    bool normalize = false;
    if (spec.contains("normalize")) {
        if (!spec.at("normalize").is_boolean()) throw ConfigError("\"normalize\" must be a bool");
        normalize = spec.at("normalize").get<bool>();
    }
    LocationDensity d(std::move(family));
    return normalize ? d.normalized() : d;
}

namespace {

const std::map<std::string, const char*>& builtin_specs() {
    static const std::map<std::string, const char*> specs = {
        {"gaussian", R"({"family":"gaussian","normalize":true})"},
        {"logistic", R"({"family":"logistic","normalize":true})"},
        {"student-t", R"({"family":"student-t","params":{"nu":8},"normalize":true})"},
        {"skew-normal", R"({"family":"skew-normal","params":{"lambda":2},"normalize":true})"},
        {"skew-normal-mild",
         R"({"family":"skew-normal","params":{"lambda":0.5},"normalize":true})"},
        {"mix-skew",
         R"({"family":"mixture","components":[
             {"density":{"family":"gaussian","params":{"mean":0,"sigma":1}},"weight":0.75},
             {"density":{"family":"gaussian","params":{"mean":2,"sigma":2}},"weight":0.25}],
             "normalize":true})"},
        {"mix-bimodal",
         R"({"family":"mixture","components":[
             {"density":{"family":"gaussian","params":{"mean":-1.5,"sigma":1}},"weight":0.5},
             {"density":{"family":"gaussian","params":{"mean":1.5,"sigma":1}},"weight":0.5}],
             "normalize":true})"},
    };
    return specs;
}

}  // namespace

LocationDensity builtin_density(const std::string& shorthand) {
    const auto& specs = builtin_specs();
    auto it = specs.find(shorthand);
    if (it == specs.end()) {
        std::string msg = "unknown density \"" + shorthand + "\"; known:";
        for (const auto& name : builtin_density_names()) msg += " " + name;
        throw ConfigError(msg);
    }
    return density_from_json(json::parse(it->second));
}

const std::vector<std::string>& builtin_density_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, spec] : builtin_specs()) {
            (void)spec;
            v.push_back(name);
        }
        return v;
    }();
    return names;
}

}  // namespace hoexp::density
