#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "hoexp/config.hpp"
#include "hoexp/errors.hpp"

using hoexp::ConfigError;
using nlohmann::json;
using namespace hoexp::config;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("hoexp_cfg_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults survive an empty config") {
    RunConfig c = config_from_json(json::object());
    CHECK(c.density.get<std::string>() == "gaussian");
    CHECK(c.alphas == std::vector<double>{0.05});
    CHECK(c.ns == std::vector<double>{25.0, 100.0});
    CHECK(c.v_levels == std::vector<double>{0.5, 0.975});
    CHECK(c.reps == 10000);
    CHECK(c.seed == 1);
    CHECK(c.threads == 0);
    CHECK(c.output.empty());
    CHECK(c.equation == "EQ2");
    CHECK(c.format == "json");
    CHECK(!c.simulate);
    CHECK(!c.bootstrap_se);
    CHECK(c.tolerance == 1e-6);
    CHECK(c.failure_threshold == 1e-4);
}

TEST_CASE("full round trip is stable") {
    json j = {{"density", {{"family", "logistic"}, {"normalize", true}}},
              {"alphas", {0.05, 0.1}},
              {"n", {16, 64}},
              {"v", {0.5, 0.9, 0.975}},
              {"reps", 50000},
              {"seed", 99},
              {"threads", 4},
              {"output", "out.json"},
              {"plot_output", "plot.csv"},
              {"equation", "EQ6"},
              {"format", "text"},
              {"simulate", true},
              {"bootstrap_se", true},
              {"bootstrap_b", 200},
              {"tolerance", 1e-7},
              {"failure_threshold", 0.01}};
    RunConfig c = config_from_json(j);
    CHECK(c.seed == 99);
    CHECK(c.equation == "EQ6");
    CHECK(c.bootstrap_b == 200);

    json rendered = to_json(c);
    RunConfig again = config_from_json(rendered);
    CHECK(to_json(again) == rendered);
    // every input key survives the trip
    for (const auto& item : j.items()) {
        CHECK(rendered.at(item.key()) == item.value());
    }
}

TEST_CASE("unknown keys are rejected with the key name") {
    try {
        config_from_json({{"repz", 100}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("repz") != std::string::npos);
        CHECK(msg.find("reps") != std::string::npos);  // known keys listed
    }
}

TEST_CASE("type errors name the field") {
    CHECK_THROWS_AS(config_from_json({{"reps", "many"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"reps", 10.5}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"alphas", json::array()}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"alphas", {0.05, "x"}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"density", 7}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"seed", -3}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"format", "yaml"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"simulate", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("density field builds builtins and inline specs") {
    RunConfig c;
    auto d = build_density(c);
    CHECK(d.name() == "gaussian(0,1)");

    c.density = json{{"family", "gaussian"}, {"params", {{"mean", 0.0}, {"sigma", 2.0}}}};
    CHECK(build_density(c).name() == "gaussian(0,2)");

    c.density = "no-such-density";
    CHECK_THROWS_AS(build_density(c), ConfigError);
}

TEST_CASE("load_config reads files and reports problems") {
    TempDir tmp;
    auto good = tmp.file("good.json");
    {
        std::ofstream out(good);
        out << R"({"reps": 5000, "seed": 11})";
    }
    RunConfig c = load_config(good);
    CHECK(c.reps == 5000);
    CHECK(c.seed == 11);

    CHECK_THROWS_AS(load_config(tmp.file("missing.json")), ConfigError);

    auto bad = tmp.file("bad.json");
    {
        std::ofstream out(bad);
        out << "{ not json";
    }
    try {
        load_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
    }
}

TEST_CASE("atomic writes land complete and leave no temp files") {
    TempDir tmp;
    auto target = tmp.file("out.csv");
    write_atomic(target, "a,b\n1,2\n");
    CHECK(slurp(target) == "a,b\n1,2\n");

    write_atomic(target, "replaced");
    CHECK(slurp(target) == "replaced");

    int entries = 0;
    for (const auto& e : std::filesystem::directory_iterator(tmp.path)) {
        ++entries;
        CHECK(e.path().filename().string() == "out.csv");
    }
    CHECK(entries == 1);

    CHECK_THROWS_AS(write_atomic(tmp.file("no/such/dir/out.csv"), "x"), ConfigError);
}

}  // TEST_SUITE
