#pragma once

#include <functional>
#include <vector>

#include "batchode/batch.hpp"
#include "batchode/ode_problem.hpp"

namespace batchode {

struct BatchResult {
    BatchStates states;
    std::vector<IntegrationStats> stats;  // one entry per system
};

// Advances every system of the batch independently from t to tNext with the
// chosen solver's driver. Systems are split into contiguous index chunks,
// one per worker thread; since systems never interact, the outputs are
// bitwise independent of the worker count and of the partitioning. A system
// whose step size underflows freezes at its last accepted state and is
// flagged in its stats; the others proceed.
BatchResult integrateBatch(const OdeProblem& problem, const BatchStates& batch,
                           double t, double tNext, SolverChoice solver,
                           const ToleranceSettings& tol, int workers);

// Receives (window end time, snapshot). The snapshot is an independent copy
// the sink may retain.
using OuterStepSink = std::function<void(double t, BatchStates snapshot)>;

struct OuterLoopResult {
    BatchStates states;
    std::vector<IntegrationStats> stats;  // per system, summed over windows
    int outerSteps = 0;
};

// Runs integrateBatch over consecutive windows [t, t + hOuter] until tEnd,
// invoking the sink after each window. Every window is a restart: no
// controller state (step size, error history, eigenvector) survives the
// window boundary.
OuterLoopResult outerLoop(const OdeProblem& problem, const BatchStates& initial,
                          double t0, double tEnd, double hOuter,
                          SolverChoice solver, const ToleranceSettings& tol,
                          int workers, const OuterStepSink& sink);

}  // namespace batchode
