#pragma once

#include <span>
#include <vector>

#include "batchode/ode_problem.hpp"

// Second-order Runge-Kutta-Chebyshev staged step with analytically computed
// coefficients for any stage count s >= 2, weighted-RMS error control,
// adaptive step-size and stage-count selection, and the startup procedure.
namespace batchode::rkc {

// Chebyshev polynomial of the first kind with its first two derivatives,
// all evaluated by the three-term recursion.
struct ChebyshevEval {
    double T;
    double dT;
    double ddT;
};
ChebyshevEval chebyshevEval(int degree, double x);

// Stage coefficients for a given (s, kappa). Vectors are indexed by stage
// number j (position 0 unused where a coefficient starts at j = 1 or 2).
struct Coefficients {
    int stages = 0;
    double kappa = 0.0;
    double omega0 = 0.0;  // 1 + kappa/s^2
    double omega1 = 0.0;  // T'_s(omega0) / T''_s(omega0)
    std::vector<double> mu;          // j = 2..s
    std::vector<double> nu;          // j = 2..s
    std::vector<double> muTilde;     // j = 1..s
    std::vector<double> gammaTilde;  // j = 2..s
    std::vector<double> b;           // j = 0..s
    std::vector<double> a;           // j = 0..s
    std::vector<double> c;           // j = 0..s, c[0] = 0, c[s] = 1
};
Coefficients coefficients(int stages, double kappa);  // throws InvalidStageCount

// Controller state carried between internal steps of one driver invocation.
// Slots mirror the reference driver's work vector; a value below uround
// reads as "unset". Nothing here survives across outer windows.
struct Workspace {
    double errOld = 0.0;   // previous accepted step's error norm
    double hOld = 0.0;     // previous accepted step size
    double h = 0.0;        // current step size
    double specRad = 0.0;  // spectral radius estimate
    std::vector<double> eigenvector;  // power-method warm start

    bool isSet(double slot, double uround) const { return slot >= uround; }
    void reset(std::size_t dim) {
        errOld = hOld = h = specRad = 0.0;
        eigenvector.assign(dim, 0.0);
    }
};

struct Scratch {
    std::vector<double> w1, w2, fstage;   // stage recursion buffers
    std::vector<double> f0, ytrial, ftrial;  // driver-level
    Coefficients coefCache;
    void resize(std::size_t dim);
    const Coefficients& coefficientsFor(int stages, double kappa);
};

// One s-stage step of size h from (t, y) into yNext. f0 must hold
// rhs(t, y, g); stages 2..s evaluate the rhs once each (s - 1 calls), at
// t + c_{j-1} h. Uses three scratch arrays besides y, f0 (five total
// state-length arrays). rhs == 0 reproduces y bitwise.
void step(const OdeProblem& problem, double t, std::span<const double> y,
          std::span<const double> g, std::span<const double> f0, double h,
          const Coefficients& coef, std::span<double> yNext, Scratch& scratch);

// Weighted RMS error norm of the step estimate
//   0.8 (yOld - yNew) + 0.4 h (fOld + fNew)
// with per-component weight absTol + relTol * max(|yOld|, |yNew|).
// err <= 1 signals acceptance.
double errorNorm(std::span<const double> yOld, std::span<const double> yNew,
                 std::span<const double> fOld, std::span<const double> fNew,
                 double h, double absTol, double relTol);

// Stage count for the current (h, sigma): s = 1 + trunc(sqrt(1.54 h sigma + 1)),
// capped at mMax = round(sqrt(relTol / (10 uround))) (>= 2); when the cap
// binds, h is reduced to (s^2 - 1)/(1.54 sigma).
struct StageSelection {
    int stages;
    double h;
};
StageSelection stageCount(double h, double sigma, double relTol, double uround);

// Startup step size: a tentative step of min(hMax, 1/sigma) is probed with a
// forward-Euler trial, and the resulting scaled derivative-difference norm
// picks h0.
struct InitialStep {
    double h;
    double err;
};
InitialStep initialStep(const OdeProblem& problem, double t,
                        std::span<const double> y, std::span<const double> g,
                        std::span<const double> f0, double sigma, double hMax,
                        double hMin, const ToleranceSettings& tol, Scratch& scratch);

// Step size after an accepted step. With history (hOld, errOld) available the
// controller uses the two-step formula; the first accepted step falls back to
// fac = min(10, 0.8/err^{1/3}). Result is h * max(0.1, fac) clamped to
// [hMin, hMax]. Pass hMin = 0, hMax = inf to observe the raw factor.
double nextStepAccepted(double err, double errOld, double h, double hOld,
                        bool firstAccepted, double hMin, double hMax);

// Step size after a rejected step: 0.8 h / err^{1/3} (err > 1, so strictly
// smaller than h).
double nextStepRejected(double err, double h);

// Adaptive integration of one system from t to tEnd, in place. The spectral
// radius is re-estimated on the first pass, every 25 accepted steps, and
// after every rejection. If wsOut is given the driver uses (and resets) that
// workspace so callers can inspect the final controller state.
IntegrationStats driver(const OdeProblem& problem, double t, double tEnd,
                        std::span<double> y, std::span<const double> g,
                        const ToleranceSettings& tol, Scratch& scratch,
                        Workspace* wsOut = nullptr,
                        const StepObserver* observer = nullptr);
IntegrationStats driver(const OdeProblem& problem, double t, double tEnd,
                        std::span<double> y, std::span<const double> g,
                        const ToleranceSettings& tol);

// Fixed-step, fixed-stage harness for order-of-convergence studies.
void integrateFixed(const OdeProblem& problem, double t0, double tEnd,
                    long numSteps, int stages, double kappa,
                    std::span<double> y, std::span<const double> g);

}  // namespace batchode::rkc
