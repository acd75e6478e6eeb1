#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "batchode/bench.hpp"

int main(int argc, char** argv) {
    CLI::App app{"odebench: batched ODE integration benchmark"};

    batchode::bench::RunConfig cfg;
    std::string problem = "pleiades";
    std::string solver = "rkck";
    std::string mode = "integrate";

    app.add_option("--problem", problem, "pleiades|heat|expdecay|harmonic")
        ->capture_default_str();
    app.add_option("--solver", solver, "rkck|rkc")->capture_default_str();
    app.add_option("--mode", mode, "integrate|convergence|scaling")
        ->capture_default_str();
    app.add_option("--num-systems", cfg.numSystems, "number of independent systems")
        ->capture_default_str();
    app.add_option("--t0", cfg.t0, "start time")->capture_default_str();
    app.add_option("--t-end", cfg.tEnd, "end time")->capture_default_str();
    app.add_option("--outer-step", cfg.hOuter, "outer (restart) window size")
        ->capture_default_str();
    app.add_option("--eps", cfg.eps, "RKCK tolerance")->capture_default_str();
    app.add_option("--abs-tol", cfg.absTol, "RKC absolute tolerance")
        ->capture_default_str();
    app.add_option("--rel-tol", cfg.relTol, "RKC relative tolerance")
        ->capture_default_str();
    app.add_option("--workers", cfg.workers,
                   "worker threads (scaling mode: maximum of the ladder)")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "perturbation seed")->capture_default_str();
    app.add_option("--perturb", cfg.perturbMagnitude,
                   "relative perturbation magnitude in [0, 0.1]")
        ->capture_default_str();
    app.add_option("--output", cfg.outputPath, "CSV output path (empty: skip)");
    app.add_option("--summary", cfg.summaryPath, "JSON summary path (empty: skip)");
    app.add_option("--pleiades-ic", cfg.pleiadesIcPath,
                   "Pleiades initial-condition asset")
        ->capture_default_str();
    app.add_option("--heat-points", cfg.heatPoints, "heat equation interior points")
        ->capture_default_str();
    app.add_option("--ladder-h0", cfg.ladderH0,
                   "convergence mode: largest step (0 = solver default)")
        ->capture_default_str();
    app.add_option("--ladder-points", cfg.ladderPoints,
                   "convergence mode: number of halvings")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.problem = batchode::bench::parseProblem(problem);
        cfg.solver = batchode::bench::parseSolver(solver);
        cfg.mode = batchode::bench::parseMode(mode);
    } catch (const batchode::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    return batchode::bench::run(cfg);
}
