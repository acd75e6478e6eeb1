#include "batchode/batch_driver.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "batchode/rkc.hpp"
#include "batchode/rkck.hpp"

namespace batchode {

namespace {

// Integrates systems [begin, end) of `out` in place. Scratch buffers are
// reused across the chunk, so the hot loop never allocates.
void integrateChunk(const OdeProblem& problem, const BatchStates& input,
                    BatchStates& out, double t, double tNext, SolverChoice solver,
                    const ToleranceSettings& tol, int begin, int end,
                    std::vector<IntegrationStats>& stats) {
    std::vector<double> yLocal(problem.dim);
    std::vector<double> gLocal(problem.paramDim);
    rkck::Scratch rkckScratch;
    rkc::Scratch rkcScratch;
    for (int i = begin; i < end; ++i) {
        input.gatherState(i, yLocal);
        input.gatherParams(i, gLocal);
        if (solver == SolverChoice::RKCK)
            stats[i] = rkck::driver(problem, t, tNext, yLocal, gLocal, tol, rkckScratch);
        else
            stats[i] = rkc::driver(problem, t, tNext, yLocal, gLocal, tol, rkcScratch,
                                   nullptr, nullptr);
        out.scatterState(i, yLocal);
    }
}

}  // namespace

BatchResult integrateBatch(const OdeProblem& problem, const BatchStates& batch,
                           double t, double tNext, SolverChoice solver,
                           const ToleranceSettings& tol, int workers) {
    if (!(tNext > t)) throw InvalidInterval("integrateBatch: tNext must exceed t");
    batch.validate();
    tol.validate();
    if (batch.dim != problem.dim)
        throw InvalidShape("integrateBatch: batch dim does not match problem dim");
    if (batch.paramDim != problem.paramDim)
        throw InvalidShape("integrateBatch: batch paramDim does not match problem");
    if (workers < 1) throw InvalidShape("integrateBatch: workers must be positive");
    if (!problem.rhs) throw InvalidShape("integrateBatch: problem has no rhs");

    BatchResult result{batch, std::vector<IntegrationStats>(batch.numSystems)};
    const int n = batch.numSystems;
    const int useWorkers = std::min(workers, n);

    if (useWorkers == 1) {
        integrateChunk(problem, batch, result.states, t, tNext, solver, tol, 0, n,
                       result.stats);
        return result;
    }

    // Chunked static partition in index order. Each worker touches only its
    // systems' interleaved slots, so no synchronization is needed.
    std::vector<std::thread> pool;
    pool.reserve(useWorkers);
    std::exception_ptr firstError;
    std::mutex errorMutex;
    const int base = n / useWorkers;
    const int rem = n % useWorkers;
    int begin = 0;
    for (int w = 0; w < useWorkers; ++w) {
        const int len = base + (w < rem ? 1 : 0);
        const int end = begin + len;
        pool.emplace_back([&, begin, end] {
            try {
                integrateChunk(problem, batch, result.states, t, tNext, solver, tol,
                               begin, end, result.stats);
            } catch (...) {
                std::lock_guard<std::mutex> lock(errorMutex);
                if (!firstError) firstError = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& th : pool) th.join();
    if (firstError) std::rethrow_exception(firstError);
    return result;
}

OuterLoopResult outerLoop(const OdeProblem& problem, const BatchStates& initial,
                          double t0, double tEnd, double hOuter,
                          SolverChoice solver, const ToleranceSettings& tol,
                          int workers, const OuterStepSink& sink) {
    if (!(tEnd > t0)) throw InvalidInterval("outerLoop: tEnd must exceed t0");
    if (!(hOuter > 0.0)) throw InvalidInterval("outerLoop: hOuter must be positive");

    // Window count from the exact span/hOuter ratio, with a guard against
    // the quotient landing one ulp above an integer.
    const double ratio = (tEnd - t0) / hOuter;
    const long nWindows = std::max(1L, static_cast<long>(std::ceil(ratio - 1e-9)));

    OuterLoopResult result{initial, std::vector<IntegrationStats>(initial.numSystems), 0};
    double t = t0;
    for (long k = 1; k <= nWindows; ++k) {
        const double tk = (k == nWindows) ? tEnd : t0 + static_cast<double>(k) * hOuter;
        BatchResult window = integrateBatch(problem, result.states, t, tk, solver,
                                            tol, workers);
        result.states = std::move(window.states);
        for (std::size_t i = 0; i < result.stats.size(); ++i)
            result.stats[i].merge(window.stats[i]);
        ++result.outerSteps;
        if (sink) sink(tk, result.states);  // snapshot copy made at the call
        t = tk;
    }
    return result;
}

}  // namespace batchode
