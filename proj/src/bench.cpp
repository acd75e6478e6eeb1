#include "batchode/bench.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <vector>

#include <json.hpp>

#include "batchode/batch_driver.hpp"
#include "batchode/problems.hpp"
#include "batchode/rkc.hpp"
#include "batchode/rkck.hpp"

namespace batchode::bench {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string formatDouble17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parseDouble(const std::string& text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{})
        throw ConfigError("cannot parse floating-point value: " + text);
    return v;
}

ProblemKind parseProblem(const std::string& name) {
    if (name == "pleiades") return ProblemKind::Pleiades;
    if (name == "heat") return ProblemKind::Heat;
    if (name == "expdecay") return ProblemKind::ExpDecay;
    if (name == "harmonic") return ProblemKind::Harmonic;
    throw ConfigError("unknown problem: " + name);
}

SolverChoice parseSolver(const std::string& name) {
    if (name == "rkck") return SolverChoice::RKCK;
    if (name == "rkc") return SolverChoice::RKC;
    throw ConfigError("unknown solver: " + name);
}

RunMode parseMode(const std::string& name) {
    if (name == "integrate") return RunMode::Integrate;
    if (name == "convergence") return RunMode::Convergence;
    if (name == "scaling") return RunMode::Scaling;
    throw ConfigError("unknown mode: " + name);
}

namespace {

const char* problemName(ProblemKind p) {
    switch (p) {
        case ProblemKind::Pleiades: return "pleiades";
        case ProblemKind::Heat: return "heat";
        case ProblemKind::ExpDecay: return "expdecay";
        case ProblemKind::Harmonic: return "harmonic";
    }
    return "?";
}

const char* solverName(SolverChoice s) {
    return s == SolverChoice::RKCK ? "rkck" : "rkc";
}

const char* modeName(RunMode m) {
    switch (m) {
        case RunMode::Integrate: return "integrate";
        case RunMode::Convergence: return "convergence";
        case RunMode::Scaling: return "scaling";
    }
    return "?";
}

struct Workload {
    OdeProblem problem;
    BatchStates batch;
};

Workload buildWorkload(const RunConfig& cfg) {
    Workload w;
    std::vector<double> base;
    switch (cfg.problem) {
        case ProblemKind::Pleiades: {
            w.problem = problems::pleiades();
            const auto ic = problems::loadPleiadesInitialConditions(cfg.pleiadesIcPath);
            base.assign(ic.begin(), ic.end());
            break;
        }
        case ProblemKind::Heat:
            w.problem = problems::heatEquation(cfg.heatPoints);
            base = problems::heatInitialCondition(cfg.heatPoints);
            break;
        case ProblemKind::ExpDecay:
            w.problem = problems::expDecay();
            base = {1.0};
            break;
        case ProblemKind::Harmonic:
            w.problem = problems::harmonic();
            base = {1.0, 0.0};
            break;
    }
    w.batch = problems::perturbInitialConditions(base, cfg.perturbMagnitude,
                                                 cfg.seed, cfg.numSystems);
    if (cfg.problem == ProblemKind::ExpDecay) {
        const double g0 = 1.0;
        fillParams(w.batch, std::span<const double>(&g0, 1));
    }
    return w;
}

ToleranceSettings tolerancesFor(const RunConfig& cfg) {
    ToleranceSettings tol;
    tol.eps = cfg.eps;
    tol.absTol = cfg.absTol;
    tol.relTol = cfg.relTol;
    tol.validate();
    return tol;
}

std::ofstream openOutput(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out) throw IoError("cannot open output file for writing: " + path);
    return out;
}

void finishOutput(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("error while writing output file: " + path);
}

json configJson(const RunConfig& cfg) {
    return json{{"problem", problemName(cfg.problem)},
                {"solver", solverName(cfg.solver)},
                {"mode", modeName(cfg.mode)},
                {"numSystems", cfg.numSystems},
                {"t0", cfg.t0},
                {"tEnd", cfg.tEnd},
                {"hOuter", cfg.hOuter},
                {"eps", cfg.eps},
                {"absTol", cfg.absTol},
                {"relTol", cfg.relTol},
                {"workers", cfg.workers},
                {"seed", cfg.seed},
                {"perturbMagnitude", cfg.perturbMagnitude},
                {"heatPoints", cfg.heatPoints},
                {"pleiadesIcPath", cfg.pleiadesIcPath}};
}

double finiteOr(double v, double fallback) {
    return std::isfinite(v) ? v : fallback;
}

json statsJson(const std::vector<IntegrationStats>& stats) {
    IntegrationStats total;
    json underflow = json::array();
    for (std::size_t i = 0; i < stats.size(); ++i) {
        total.merge(stats[i]);
        if (stats[i].underflow) underflow.push_back(i);
    }
    return json{{"stepsAccepted", total.stepsAccepted},
                {"stepsRejected", total.stepsRejected},
                {"rhsEvals", total.rhsEvals},
                {"specRadEvals", total.specRadEvals},
                {"hMinSeen", finiteOr(total.hMinSeen, 0.0)},
                {"hMaxSeen", total.hMaxSeen},
                {"underflowCount", underflow.size()},
                {"underflowSystems", underflow}};
}

void writeSummary(const RunConfig& cfg, const json& summary) {
    if (cfg.summaryPath.empty()) return;
    std::ofstream out = openOutput(cfg.summaryPath);
    out << summary.dump(2) << '\n';
    finishOutput(out, cfg.summaryPath);
}

struct TimedRun {
    OuterLoopResult result;
    std::vector<std::pair<double, BatchStates>> snapshots;  // (t, states)
    double meanSecondsPerOuterStep = 0.0;
};

// Runs the outer loop with per-window wall-clock timing. Timing covers
// integration plus the snapshot copy handed to the sink; file output happens
// afterwards. Snapshots are retained only when keepSnapshots is set.
TimedRun timedOuterLoop(const OdeProblem& problem, const BatchStates& batch,
                        const RunConfig& cfg, const ToleranceSettings& tol,
                        int workers, bool keepSnapshots) {
    TimedRun run;
    std::vector<Clock::duration> windows;
    Clock::time_point mark = Clock::now();
    OuterStepSink sink = [&](double t, BatchStates snap) {
        windows.push_back(Clock::now() - mark);
        if (keepSnapshots) run.snapshots.emplace_back(t, std::move(snap));
        mark = Clock::now();
    };
    run.result = outerLoop(problem, batch, cfg.t0, cfg.tEnd, cfg.hOuter, cfg.solver,
                           tol, workers, sink);
    Clock::duration total{0};
    for (const auto& w : windows) total += w;
    run.meanSecondsPerOuterStep =
        std::chrono::duration<double>(total).count() / static_cast<double>(windows.size());
    return run;
}

}  // namespace

int runIntegrate(const RunConfig& cfg) {
    const Workload w = buildWorkload(cfg);
    const ToleranceSettings tol = tolerancesFor(cfg);
    const TimedRun run = timedOuterLoop(w.problem, w.batch, cfg, tol, cfg.workers,
                                        /*keepSnapshots=*/true);

    if (!cfg.outputPath.empty()) {
        std::ofstream out = openOutput(cfg.outputPath);
        out << "outerStepIndex,t,systemIndex";
        for (int j = 0; j < w.problem.dim; ++j) out << ",var" << j;
        out << '\n';
        std::vector<double> row(w.problem.dim);
        for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
            const auto& [t, snap] = run.snapshots[k];
            for (int i = 0; i < snap.numSystems; ++i) {
                snap.gatherState(i, row);
                out << (k + 1) << ',' << formatDouble17(t) << ',' << i;
                for (double v : row) out << ',' << formatDouble17(v);
                out << '\n';
            }
        }
        finishOutput(out, cfg.outputPath);
    }

    json summary{{"config", configJson(cfg)},
                 {"outerSteps", run.result.outerSteps},
                 {"wallClockPerOuterStepSeconds", run.meanSecondsPerOuterStep},
                 {"workers", cfg.workers},
                 {"stats", statsJson(run.result.stats)}};
    writeSummary(cfg, summary);
    return 0;
}

int runConvergence(const RunConfig& cfg) {
    if (cfg.problem != ProblemKind::ExpDecay && cfg.problem != ProblemKind::Harmonic)
        throw ConfigError("convergence mode needs an analytically solvable problem "
                          "(expdecay or harmonic)");
    const double span = cfg.tEnd - cfg.t0;
    if (!(span > 0.0)) throw ConfigError("convergence mode: empty interval");
    if (cfg.ladderPoints < 2) throw ConfigError("convergence mode: need >= 2 ladder points");

    OdeProblem problem;
    std::vector<double> y0;
    std::vector<double> g;
    if (cfg.problem == ProblemKind::ExpDecay) {
        problem = problems::expDecay();
        y0 = {1.0};
        g = {1.0};
    } else {
        problem = problems::harmonic();
        y0 = {1.0, 0.0};
    }
    auto exactError = [&](std::span<const double> y) {
        if (cfg.problem == ProblemKind::ExpDecay)
            return std::fabs(y[0] - std::exp(-span));
        const double dq = y[0] - std::cos(span);
        const double dp = y[1] + std::sin(span);
        return std::sqrt(dq * dq + dp * dp);
    };

    const double h0 = cfg.ladderH0 > 0.0
                          ? cfg.ladderH0
                          : (cfg.solver == SolverChoice::RKCK ? 0.1 : 0.05);
    std::vector<double> hs, errs;
    for (int k = 0; k < cfg.ladderPoints; ++k) {
        const double h = h0 / static_cast<double>(1L << k);
        const long steps = std::lround(span / h);
        std::vector<double> y = y0;
        if (cfg.solver == SolverChoice::RKCK)
            rkck::integrateFixed(problem, cfg.t0, cfg.tEnd, steps, y, g);
        else
            rkc::integrateFixed(problem, cfg.t0, cfg.tEnd, steps, /*stages=*/5,
                                ToleranceSettings{}.kappa, y, g);
        hs.push_back(span / static_cast<double>(steps));
        errs.push_back(exactError(y));
    }

    // Least-squares slope of log err against log h.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(hs.size());
    for (int i = 0; i < m; ++i) {
        const double lx = std::log(hs[i]);
        const double ly = std::log(std::fmax(errs[i], 5e-324));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    if (!cfg.outputPath.empty()) {
        std::ofstream out = openOutput(cfg.outputPath);
        out << "h,globalError\n";
        for (int i = 0; i < m; ++i)
            out << formatDouble17(hs[i]) << ',' << formatDouble17(errs[i]) << '\n';
        finishOutput(out, cfg.outputPath);
    }

    json points = json::array();
    for (int i = 0; i < m; ++i)
        points.push_back(json{{"h", hs[i]}, {"globalError", errs[i]}});
    json summary{{"config", configJson(cfg)},
                 {"slope", slope},
                 {"points", points}};
    writeSummary(cfg, summary);
    std::cout << "convergence slope: " << formatDouble17(slope) << '\n';
    return 0;
}

int runScaling(const RunConfig& cfg) {
    if (cfg.numSystems < cfg.workers)
        throw ConfigError("scaling mode requires numSystems >= workers");
    const Workload w = buildWorkload(cfg);
    const ToleranceSettings tol = tolerancesFor(cfg);

    std::vector<int> ladder;
    for (int n = 1; n <= cfg.workers; n *= 2) ladder.push_back(n);

    struct Row {
        int workers;
        double wall;
        double speedup;
    };
    std::vector<Row> rows;
    std::vector<double> reference;
    bool bitwiseIdentical = true;
    json statsOut;
    for (int workers : ladder) {
        const TimedRun run = timedOuterLoop(w.problem, w.batch, cfg, tol, workers,
                                            /*keepSnapshots=*/false);
        if (workers == 1) {
            reference = run.result.states.values;
            statsOut = statsJson(run.result.stats);
        } else if (run.result.states.values.size() != reference.size() ||
                   std::memcmp(run.result.states.values.data(), reference.data(),
                               reference.size() * sizeof(double)) != 0) {
            bitwiseIdentical = false;
        }
        rows.push_back({workers, run.meanSecondsPerOuterStep, 0.0});
    }
    for (auto& r : rows) r.speedup = rows.front().wall / r.wall;
    rows.front().speedup = 1.0;  // self-ratio, exactly

    if (!cfg.outputPath.empty()) {
        std::ofstream out = openOutput(cfg.outputPath);
        out << "workers,wallClockPerOuterStep,speedupVs1\n";
        for (const auto& r : rows)
            out << r.workers << ',' << formatDouble17(r.wall) << ','
                << formatDouble17(r.speedup) << '\n';
        finishOutput(out, cfg.outputPath);
    }

    json rowsJson = json::array();
    for (const auto& r : rows)
        rowsJson.push_back(json{{"workers", r.workers},
                                {"wallClockPerOuterStepSeconds", r.wall},
                                {"speedupVs1", r.speedup}});
    json summary{{"config", configJson(cfg)},
                 {"rows", rowsJson},
                 {"bitwiseIdentical", bitwiseIdentical},
                 {"stats", statsOut}};
    writeSummary(cfg, summary);
    if (!bitwiseIdentical)
        std::cerr << "warning: outputs differ across worker counts\n";
    return 0;
}

int run(const RunConfig& cfg) {
    try {
        switch (cfg.mode) {
            case RunMode::Integrate: return runIntegrate(cfg);
            case RunMode::Convergence: return runConvergence(cfg);
            case RunMode::Scaling: return runScaling(cfg);
        }
        throw ConfigError("unknown run mode");
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace batchode::bench
