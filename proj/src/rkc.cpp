#include "batchode/rkc.hpp"

#include <algorithm>
#include <cmath>

#include "batchode/spectral_radius.hpp"

namespace batchode::rkc {

ChebyshevEval chebyshevEval(int degree, double x) {
    if (degree <= 0) return {1.0, 0.0, 0.0};
    if (degree == 1) return {x, 1.0, 0.0};
    // T_j = 2x T_{j-1} - T_{j-2}; differentiating the recursion once and
    // twice gives the companion recurrences for T' and T''.
    double Tm2 = 1.0, Tm1 = x;
    double dm2 = 0.0, dm1 = 1.0;
    double ddm2 = 0.0, ddm1 = 0.0;
    for (int j = 2; j <= degree; ++j) {
        const double T = 2.0 * x * Tm1 - Tm2;
        const double d = 2.0 * Tm1 + 2.0 * x * dm1 - dm2;
        const double dd = 4.0 * dm1 + 2.0 * x * ddm1 - ddm2;
        Tm2 = Tm1; Tm1 = T;
        dm2 = dm1; dm1 = d;
        ddm2 = ddm1; ddm1 = dd;
    }
    return {Tm1, dm1, ddm1};
}

Coefficients coefficients(int stages, double kappa) {
    if (stages < 2)
        throw InvalidStageCount("rkc::coefficients: need at least two stages");
    Coefficients cf;
    cf.stages = stages;
    cf.kappa = kappa;
    cf.omega0 = 1.0 + kappa / (static_cast<double>(stages) * stages);

    std::vector<ChebyshevEval> T(stages + 1);
    for (int j = 0; j <= stages; ++j) T[j] = chebyshevEval(j, cf.omega0);
    cf.omega1 = T[stages].dT / T[stages].ddT;

    cf.b.assign(stages + 1, 0.0);
    cf.a.assign(stages + 1, 0.0);
    cf.c.assign(stages + 1, 0.0);
    cf.mu.assign(stages + 1, 0.0);
    cf.nu.assign(stages + 1, 0.0);
    cf.muTilde.assign(stages + 1, 0.0);
    cf.gammaTilde.assign(stages + 1, 0.0);

    for (int j = 2; j <= stages; ++j) cf.b[j] = T[j].ddT / (T[j].dT * T[j].dT);
    cf.b[0] = cf.b[2];
    cf.b[1] = 1.0 / cf.omega0;
    for (int j = 0; j <= stages; ++j) cf.a[j] = 1.0 - cf.b[j] * T[j].T;

    cf.muTilde[1] = cf.b[1] * cf.omega1;
    for (int j = 2; j <= stages; ++j) {
        cf.mu[j] = 2.0 * cf.b[j] * cf.omega0 / cf.b[j - 1];
        cf.nu[j] = -cf.b[j] / cf.b[j - 2];
        cf.muTilde[j] = 2.0 * cf.b[j] * cf.omega1 / cf.b[j - 1];
        cf.gammaTilde[j] = -cf.a[j - 1] * cf.muTilde[j];
    }

    // c_s = 1 exactly; interior nodes from the Chebyshev ratios; c_1 from
    // c_2 / T_2'(omega0) with T_2'(x) = 4x. For s = 2 the interior formula
    // at j = 2 reduces to 1, so c_2 doubles as c_s.
    for (int j = 2; j < stages; ++j) cf.c[j] = cf.omega1 * T[j].ddT / T[j].dT;
    cf.c[stages] = 1.0;
    cf.c[1] = cf.c[2] / (4.0 * cf.omega0);
    return cf;
}

void Scratch::resize(std::size_t dim) {
    for (auto* v : {&w1, &w2, &fstage, &f0, &ytrial, &ftrial})
        if (v->size() != dim) v->assign(dim, 0.0);
}

const Coefficients& Scratch::coefficientsFor(int stages, double kappa) {
    if (coefCache.stages != stages || coefCache.kappa != kappa)
        coefCache = coefficients(stages, kappa);
    return coefCache;
}

void step(const OdeProblem& problem, double t, std::span<const double> y,
          std::span<const double> g, std::span<const double> f0, double h,
          const Coefficients& cf, std::span<double> yNext, Scratch& s) {
    const std::size_t n = y.size();
    const int stages = cf.stages;
    s.resize(n);

    // The combination (1-mu-nu) w0 + mu w_{j-1} + nu w_{j-2} is evaluated as
    // y + mu (w_{j-1} - y) + nu (w_{j-2} - y), which is algebraically equal
    // and makes rhs == 0 an exact fixed point.
    double* wjm1 = s.w1.data();
    double* wjm2 = s.w2.data();
    const double mu1h = cf.muTilde[1] * h;
    for (std::size_t i = 0; i < n; ++i) wjm1[i] = y[i] + mu1h * f0[i];

    bool prevIsY = true;  // w_{j-2} is y itself at j = 2
    for (int j = 2; j <= stages; ++j) {
        problem.rhs(t + cf.c[j - 1] * h, std::span<const double>(wjm1, n), g, s.fstage);
        const double muj = cf.mu[j];
        const double nuj = cf.nu[j];
        const double mujh = cf.muTilde[j] * h;
        const double gjh = cf.gammaTilde[j] * h;
        double* out = wjm2;  // overwrite w_{j-2}, element-wise safe
        if (prevIsY) {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = y[i] + muj * (wjm1[i] - y[i]) + mujh * s.fstage[i] + gjh * f0[i];
            prevIsY = false;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = y[i] + muj * (wjm1[i] - y[i]) + nuj * (wjm2[i] - y[i]) +
                         mujh * s.fstage[i] + gjh * f0[i];
        }
        std::swap(wjm1, wjm2);  // out becomes w_{j-1}
    }
    std::copy(wjm1, wjm1 + n, yNext.begin());
}

double errorNorm(std::span<const double> yOld, std::span<const double> yNew,
                 std::span<const double> fOld, std::span<const double> fNew,
                 double h, double absTol, double relTol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < yOld.size(); ++i) {
        double est = 0.8 * (yOld[i] - yNew[i]) + 0.4 * h * (fOld[i] + fNew[i]);
        est /= absTol + relTol * std::fmax(std::fabs(yOld[i]), std::fabs(yNew[i]));
        sum += est * est;
    }
    return std::sqrt(sum / static_cast<double>(yOld.size()));
}

StageSelection stageCount(double h, double sigma, double relTol, double uround) {
    long mMax = std::lround(std::sqrt(relTol / (10.0 * uround)));
    if (mMax < 2) mMax = 2;
    // Truncation, not rounding, matches the stability-boundary derivation.
    // Comparing before the int cast keeps huge h*sigma from overflowing.
    const double raw = std::sqrt(1.54 * h * sigma + 1.0);
    long s = raw < static_cast<double>(mMax) ? 1 + static_cast<long>(raw) : mMax + 1;
    double hOut = h;
    if (s > mMax) {
        s = mMax;
        hOut = (static_cast<double>(s) * static_cast<double>(s) - 1.0) / (1.54 * sigma);
    }
    return {static_cast<int>(s), hOut};
}

InitialStep initialStep(const OdeProblem& problem, double t,
                        std::span<const double> y, std::span<const double> g,
                        std::span<const double> f0, double sigma, double hMax,
                        double hMin, const ToleranceSettings& tol, Scratch& s) {
    const std::size_t n = y.size();
    s.resize(n);
    double h = hMax;
    if (sigma * h > 1.0) h = 1.0 / sigma;
    h = std::fmax(h, hMin);

    for (std::size_t i = 0; i < n; ++i) s.w1[i] = y[i] + h * f0[i];
    problem.rhs(t + h, s.w1, g, s.fstage);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double est = (s.fstage[i] - f0[i]) / (tol.absTol + tol.relTol * std::fabs(y[i]));
        sum += est * est;
    }
    const double err = h * std::sqrt(sum / static_cast<double>(n));

    if (0.1 * h < hMax * std::sqrt(err))
        h = std::fmax(0.1 * h / std::sqrt(err), hMin);
    else
        h = hMax;
    return {h, err};
}

double nextStepAccepted(double err, double errOld, double h, double hOld,
                        bool firstAccepted, double hMin, double hMax) {
    double fac = 10.0;
    if (firstAccepted) {
        const double t2 = std::cbrt(err);
        if (0.8 < fac * t2) fac = 0.8 / t2;
    } else {
        const double t1 = 0.8 * h * std::cbrt(errOld);
        const double cb = std::cbrt(err);
        const double t2 = hOld * cb * cb;
        if (t1 < fac * t2) fac = t1 / t2;
    }
    const double hNew = h * std::fmax(0.1, fac);
    return std::fmax(hMin, std::fmin(hMax, hNew));
}

double nextStepRejected(double err, double h) {
    return 0.8 * h / std::cbrt(err);
}

IntegrationStats driver(const OdeProblem& problem, double t, double tEnd,
                        std::span<double> y, std::span<const double> g,
                        const ToleranceSettings& tol, Scratch& scratch,
                        Workspace* wsOut, const StepObserver* observer) {
    if (!(tEnd > t)) throw InvalidInterval("rkc::driver: tEnd must exceed t");
    const std::size_t dim = y.size();
    scratch.resize(dim);

    Workspace local;
    Workspace& ws = wsOut ? *wsOut : local;
    ws.reset(dim);  // every invocation is a restart

    const double hMax = std::fabs(tEnd - t);
    IntegrationStats stats;
    long numStep = 0;

    problem.rhs(t, y, g, scratch.f0);
    ++stats.rhsEvals;
    // The first derivative doubles as the eigenvector seed.
    ws.eigenvector.assign(scratch.f0.begin(), scratch.f0.end());

    auto estimateSpecRad = [&] {
        const specrad::Result sr = specrad::powerMethod(problem, t, y, g, scratch.f0,
                                                        hMax, ws.eigenvector);
        ws.specRad = sr.sigma;
        ws.eigenvector = sr.eigenvector;
        ++stats.specRadEvals;
        stats.rhsEvals += sr.iterations;
    };

    while (tEnd - t > tol.uround * std::fabs(tEnd)) {
        const double hMin = 10.0 * tol.uround * std::fmax(std::fabs(t), hMax);

        // Stretch the last step a little rather than leaving a sliver.
        if (1.1 * ws.h >= std::fabs(tEnd - t)) ws.h = std::fabs(tEnd - t);

        if (numStep % 25 == 0) estimateSpecRad();

        if (ws.h < tol.uround) {  // first pass: pick the startup step
            const InitialStep init = initialStep(problem, t, y, g, scratch.f0,
                                                 ws.specRad, hMax, hMin, tol, scratch);
            ++stats.rhsEvals;
            ws.h = init.h;
        }

        // A NaN-poisoned rhs leaves sigma non-finite; fall back to the
        // two-stage minimum and let the error norm reject the step.
        const double sigma = std::isfinite(ws.specRad) ? ws.specRad : 0.0;
        const StageSelection sel = stageCount(ws.h, sigma, tol.relTol, tol.uround);
        ws.h = sel.h;
        const Coefficients& cf = scratch.coefficientsFor(sel.stages, tol.kappa);

        step(problem, t, y, g, scratch.f0, ws.h, cf, scratch.ytrial, scratch);
        stats.rhsEvals += sel.stages - 1;
        problem.rhs(t + ws.h, scratch.ytrial, g, scratch.ftrial);
        ++stats.rhsEvals;

        const double err = errorNorm(y, scratch.ytrial, scratch.f0, scratch.ftrial,
                                     ws.h, tol.absTol, tol.relTol);
        const bool accepted = err <= 1.0;  // non-finite err rejects
        if (observer) (*observer)({t, ws.h, sel.stages, err, accepted});

        if (!accepted) {
            ++stats.stepsRejected;
            const double hNew = std::isfinite(err) ? nextStepRejected(err, ws.h)
                                                   : tol.p1 * ws.h;
            estimateSpecRad();  // a rejection may mean sigma went stale
            if (hNew < hMin) {  // freeze at last accepted state
                stats.underflow = true;
                break;
            }
            ws.h = hNew;
        } else {
            t += ws.h;
            ++numStep;
            stats.recordAcceptedStep(ws.h);

            const bool firstAccepted = ws.hOld < tol.uround;
            double hNew = nextStepAccepted(err, ws.errOld, ws.h, ws.hOld,
                                           firstAccepted, hMin, hMax);
            ws.errOld = std::fmax(err, tol.uround);  // keep err^(1/3) well-defined
            ws.hOld = ws.h;
            std::copy(scratch.ytrial.begin(), scratch.ytrial.end(), y.begin());
            std::swap(scratch.f0, scratch.ftrial);
            ws.h = hNew;
        }
    }
    return stats;
}

IntegrationStats driver(const OdeProblem& problem, double t, double tEnd,
                        std::span<double> y, std::span<const double> g,
                        const ToleranceSettings& tol) {
    Scratch scratch;
    return driver(problem, t, tEnd, y, g, tol, scratch, nullptr, nullptr);
}

void integrateFixed(const OdeProblem& problem, double t0, double tEnd,
                    long numSteps, int stages, double kappa,
                    std::span<double> y, std::span<const double> g) {
    if (!(tEnd > t0) || numSteps < 1)
        throw InvalidInterval("rkc::integrateFixed: bad interval or step count");
    Scratch scratch;
    scratch.resize(y.size());
    const Coefficients cf = coefficients(stages, kappa);
    const double h = (tEnd - t0) / static_cast<double>(numSteps);
    std::vector<double> f0(y.size()), ynext(y.size());
    for (long k = 0; k < numSteps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        problem.rhs(t, y, g, f0);
        step(problem, t, y, g, f0, h, cf, ynext, scratch);
        std::copy(ynext.begin(), ynext.end(), y.begin());
    }
}

}  // namespace batchode::rkc
