#pragma once

#include <array>
#include <span>
#include <vector>

#include "batchode/ode_problem.hpp"

// Fifth-order Runge-Kutta-Cash-Karp step with embedded fourth-order error
// estimate, plus the adaptive sub-stepping driver.
namespace batchode::rkck {

// Cash-Karp coefficients. Index [i-1] holds stage i; b[i-1][j-1] holds the
// weight of stage j in stage i's argument. c are the fifth-order weights,
// cstar the embedded fourth-order ones.
struct Tableau {
    std::array<double, 6> a;
    std::array<std::array<double, 5>, 6> b;
    std::array<double, 6> c;
    std::array<double, 6> cstar;
};

const Tableau& tableau();

// Reusable per-worker buffers so the hot loop never allocates.
struct Scratch {
    std::vector<double> k2, k3, k4, k5, k6, ytemp;
    std::vector<double> f0, yNext, yErr;  // driver-level
    void resize(std::size_t dim);
};

// One trial step of size h from (t, y). f0 must hold rhs(t, y, g); the
// remaining five stage derivatives are evaluated here (exactly 5 rhs calls).
// yNext receives the fifth-order solution, yErr the difference between the
// fifth- and fourth-order solutions.
void step(const OdeProblem& problem, double t, std::span<const double> y,
          std::span<const double> g, std::span<const double> f0, double h,
          std::span<double> yNext, std::span<double> yErr, Scratch& scratch);

// Allocating convenience overload.
struct StepResult {
    std::vector<double> yNext;
    std::vector<double> yErr;
};
StepResult step(const OdeProblem& problem, double t, std::span<const double> y,
                std::span<const double> g, std::span<const double> f0, double h);

// Scaled max-norm of the error estimate:
//   err = max_i |yErr_i| / (|y_i| + |h F_i| + tiny) / eps.
// err <= 1 means the step is acceptable. nanFlag reports any non-finite
// component of yErr.
struct ErrorNorm {
    double err;
    bool nanFlag;
};
ErrorNorm errorNorm(std::span<const double> y, std::span<const double> f0,
                    std::span<const double> yErr, double h, double eps, double tiny);

// Accept/reject decision plus the next step size. Rejections shrink h by at
// most a factor of ten; accepted steps grow it by at most a factor of five,
// then clamp to [hMin, hMax].
struct StepAdjustment {
    bool accepted;
    double hNew;
};
StepAdjustment adjustStep(double h, double err, bool nanFlag, double hMin,
                          double hMax, const ToleranceSettings& tol);

// Adaptive integration of one system from t to tEnd, in place.
// h0 = 0.5*(tEnd - t), hMax = tEnd - t, hMin = tol.hMinFloor. A system whose
// step size underflows freezes at its last accepted state with
// stats.underflow set.
IntegrationStats driver(const OdeProblem& problem, double t, double tEnd,
                        std::span<double> y, std::span<const double> g,
                        const ToleranceSettings& tol, Scratch& scratch,
                        const StepObserver* observer = nullptr);
IntegrationStats driver(const OdeProblem& problem, double t, double tEnd,
                        std::span<double> y, std::span<const double> g,
                        const ToleranceSettings& tol);

// Fixed-step harness (controller disabled) for order-of-convergence studies.
void integrateFixed(const OdeProblem& problem, double t0, double tEnd,
                    long numSteps, std::span<double> y, std::span<const double> g);

}  // namespace batchode::rkck
