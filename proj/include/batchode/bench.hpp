#pragma once

#include <cstdint>
#include <string>

#include "batchode/ode_problem.hpp"

// Benchmark harness behind the odebench CLI: batch construction, timed
// integration runs, convergence and worker-scaling studies, CSV/JSON output.
namespace batchode::bench {

enum class ProblemKind { Pleiades, Heat, ExpDecay, Harmonic };
enum class RunMode { Integrate, Convergence, Scaling };

struct RunConfig {
    ProblemKind problem = ProblemKind::Pleiades;
    SolverChoice solver = SolverChoice::RKCK;
    RunMode mode = RunMode::Integrate;
    int numSystems = 1024;
    double t0 = 0.0;
    double tEnd = 1.0;
    double hOuter = 0.1;
    double eps = 1.0e-10;
    double absTol = 1.0e-10;
    double relTol = 1.0e-6;
    int workers = 1;
    std::uint64_t seed = 42;
    double perturbMagnitude = 0.01;
    std::string outputPath;   // CSV; empty skips the file
    std::string summaryPath;  // JSON; empty skips the file
    std::string pleiadesIcPath = "data/pleiades_ic.txt";
    int heatPoints = 64;
    // Convergence mode: largest step of the geometric ladder (0 picks the
    // solver default) and number of halvings.
    double ladderH0 = 0.0;
    int ladderPoints = 4;
};

// Parses the string forms used by the CLI flags.
ProblemKind parseProblem(const std::string& name);
SolverChoice parseSolver(const std::string& name);
RunMode parseMode(const std::string& name);

// Integrates the configured batch over outer windows, writing one CSV row
// per (outer step, system) and a JSON summary with per-outer-step timing and
// aggregated stats. Solver-level underflow is reported, not fatal.
int runIntegrate(const RunConfig& config);

// Fixed-step order study on an analytically solvable problem (expdecay or
// harmonic); writes (h, globalError) CSV rows and the fitted log-log slope
// to the JSON summary.
int runConvergence(const RunConfig& config);

// Repeats the identical workload at worker counts 1, 2, 4, ... up to
// config.workers, writing (workers, wallClockPerOuterStep, speedupVs1) rows.
// Numerical outputs must be bitwise identical across worker counts; the run
// fails otherwise.
int runScaling(const RunConfig& config);

// Dispatches on config.mode and maps ConfigError/IoError to nonzero exits.
int run(const RunConfig& config);

// Shortest-correct textual form: 17 significant digits, locale-independent;
// parsing the result recovers the exact bit pattern.
std::string formatDouble17(double v);
double parseDouble(const std::string& text);

}  // namespace batchode::bench
