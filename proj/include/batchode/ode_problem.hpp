#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <span>

#include "batchode/errors.hpp"

namespace batchode {

// Right-hand side of dy/dt = f(t, y, g). Must be pure and reentrant:
// identical inputs produce bitwise-identical outputs, and concurrent
// invocation from multiple workers is safe.
using RhsFn = std::function<void(double t, std::span<const double> y,
                                 std::span<const double> g,
                                 std::span<double> dydt)>;

// Analytic spectral radius of df/dy, used only by tests as an oracle.
using SpecRadHintFn = std::function<double(double t, std::span<const double> y,
                                           std::span<const double> g)>;

struct OdeProblem {
    int dim = 0;        // number of unknowns N
    int paramDim = 0;   // length of the constant parameter vector g
    RhsFn rhs;
    SpecRadHintFn specRadHint;  // optional
};

// Named numerical constants shared by both drivers. eps/absTol/relTol are
// the user-facing knobs; the rest are the standard controller constants.
struct ToleranceSettings {
    double eps = 1.0e-10;      // RKCK per-step tolerance
    double absTol = 1.0e-10;   // RKC absolute tolerance
    double relTol = 1.0e-6;    // RKC relative tolerance
    double uround = 2.22e-16;  // unit roundoff
    double tiny = 1.0e-30;     // error-norm denominator floor
    double safety = 0.9;       // step controller safety factor
    double p1 = 0.1;           // maximum shrink factor per rejection
    double errcon = 1.89e-4;   // error below which RKCK growth caps at 5x
    double pgrow = -0.2;
    double pshrnk = -0.25;
    double hMinFloor = 1.0e-20;
    double kappa = 2.0 / 13.0;  // RKC damping

    void validate() const {
        if (!(eps > 0.0 && absTol > 0.0 && relTol > 0.0))
            throw InvalidShape("ToleranceSettings: eps/absTol/relTol must be positive");
        if (!(safety > 0.0 && safety < 1.0) || !(p1 > 0.0 && p1 < 1.0))
            throw InvalidShape("ToleranceSettings: safety and p1 must lie in (0, 1)");
        if (!(uround > 0.0 && tiny > 0.0 && hMinFloor > 0.0 && kappa >= 0.0))
            throw InvalidShape("ToleranceSettings: bad auxiliary constants");
    }
};

// Per-system integration bookkeeping.
struct IntegrationStats {
    long stepsAccepted = 0;
    long stepsRejected = 0;
    long rhsEvals = 0;
    long specRadEvals = 0;  // power-method invocations
    double hMinSeen = std::numeric_limits<double>::infinity();
    double hMaxSeen = 0.0;
    bool underflow = false;  // step size hit its floor without satisfying error control

    void recordAcceptedStep(double h) {
        ++stepsAccepted;
        hMinSeen = std::min(hMinSeen, h);
        hMaxSeen = std::max(hMaxSeen, h);
    }

    void merge(const IntegrationStats& other) {
        stepsAccepted += other.stepsAccepted;
        stepsRejected += other.stepsRejected;
        rhsEvals += other.rhsEvals;
        specRadEvals += other.specRadEvals;
        hMinSeen = std::min(hMinSeen, other.hMinSeen);
        hMaxSeen = std::max(hMaxSeen, other.hMaxSeen);
        underflow = underflow || other.underflow;
    }
};

enum class SolverChoice { RKCK, RKC };

// Optional per-attempt hook for instrumentation and tests. Observers must
// not mutate solver state; results are identical with or without one.
struct StepRecord {
    double t;       // step start time
    double h;       // attempted step size
    int stages;     // 6 for RKCK, s for RKC
    double err;     // scaled error norm of the attempt
    bool accepted;
};
using StepObserver = std::function<void(const StepRecord&)>;

}  // namespace batchode
