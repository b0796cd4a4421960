// Times the parallel replication loop against the serial reference and
// checks that both produce bit-identical quantile rows.

#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "hoexp/density_json.hpp"
#include "hoexp/simulate.hpp"

namespace {

template <typename F>
double seconds(F&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::string name = "gaussian";
    int n = 25;
    long reps = 20000;
    int threads = 0;
    std::uint64_t seed = 1;

    CLI::App app{"replication-loop benchmark: parallel vs. serial reference"};
    app.add_option("-d,--density", name, "builtin density (default: gaussian)");
    app.add_option("-n", n, "sample size per replication (default: 25)");
    app.add_option("-r,--reps", reps, "replications (default: 20000)");
    app.add_option("--threads", threads, "worker cap for the parallel run (0 = all)");
    app.add_option("-s,--seed", seed, "RNG seed (default: 1)");
    CLI11_PARSE(app, argc, argv);

    auto d = hoexp::density::builtin_density(name);
    hoexp::simulate::SimOptions opts;
    opts.reps = reps;
    opts.seed = seed;
    opts.threads = threads;

    hoexp::simulate::SimulationResult serial, parallel;
    double t_serial = seconds([&] { serial = hoexp::simulate::simulate_gn_serial(d, n, opts); });
    double t_parallel = seconds([&] { parallel = hoexp::simulate::simulate_gn(d, n, opts); });

    bool identical = serial.scaled_sorted == parallel.scaled_sorted &&
                     serial.solver_failures == parallel.solver_failures;

    std::printf("density=%s n=%d reps=%ld seed=%llu\n", d.name().c_str(), n, reps,
                static_cast<unsigned long long>(seed));
    std::printf("%-10s %10s %14s %10s\n", "variant", "seconds", "reps/sec", "speedup");
    std::printf("%-10s %10.3f %14.0f %10s\n", "serial", t_serial,
                static_cast<double>(reps) / t_serial, "1.00x");
    std::printf("%-10s %10.3f %14.0f %9.2fx\n", "parallel", t_parallel,
                static_cast<double>(reps) / t_parallel, t_serial / t_parallel);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
