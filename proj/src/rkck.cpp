#include "batchode/rkck.hpp"

#include <algorithm>
#include <cmath>

namespace batchode::rkck {

const Tableau& tableau() {
    static const Tableau t = {
        // a_i (a_1 unused)
        {0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0},
        // b_ij
        {{{0.0, 0.0, 0.0, 0.0, 0.0},
          {1.0 / 5.0, 0.0, 0.0, 0.0, 0.0},
          {3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0},
          {3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0},
          {-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0},
          {1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0,
           253.0 / 4096.0}}},
        // c_i (fifth order)
        {37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0},
        // c*_i (embedded fourth order)
        {2825.0 / 27648.0, 0.0, 18575.0 / 48384.0, 13525.0 / 55296.0,
         277.0 / 14336.0, 1.0 / 4.0},
    };
    return t;
}

void Scratch::resize(std::size_t dim) {
    for (auto* v : {&k2, &k3, &k4, &k5, &k6, &ytemp, &f0, &yNext, &yErr})
        if (v->size() != dim) v->assign(dim, 0.0);
}

void step(const OdeProblem& problem, double t, std::span<const double> y,
          std::span<const double> g, std::span<const double> f0, double h,
          std::span<double> yNext, std::span<double> yErr, Scratch& s) {
    const Tableau& tb = tableau();
    const std::size_t n = y.size();
    s.resize(n);

    // Stage derivatives are stored unscaled; h enters the combinations.
    for (std::size_t i = 0; i < n; ++i)
        s.ytemp[i] = y[i] + h * tb.b[1][0] * f0[i];
    problem.rhs(t + tb.a[1] * h, s.ytemp, g, s.k2);

    for (std::size_t i = 0; i < n; ++i)
        s.ytemp[i] = y[i] + h * (tb.b[2][0] * f0[i] + tb.b[2][1] * s.k2[i]);
    problem.rhs(t + tb.a[2] * h, s.ytemp, g, s.k3);

    for (std::size_t i = 0; i < n; ++i)
        s.ytemp[i] = y[i] + h * (tb.b[3][0] * f0[i] + tb.b[3][1] * s.k2[i] +
                                 tb.b[3][2] * s.k3[i]);
    problem.rhs(t + tb.a[3] * h, s.ytemp, g, s.k4);

    for (std::size_t i = 0; i < n; ++i)
        s.ytemp[i] = y[i] + h * (tb.b[4][0] * f0[i] + tb.b[4][1] * s.k2[i] +
                                 tb.b[4][2] * s.k3[i] + tb.b[4][3] * s.k4[i]);
    problem.rhs(t + tb.a[4] * h, s.ytemp, g, s.k5);

    for (std::size_t i = 0; i < n; ++i)
        s.ytemp[i] = y[i] + h * (tb.b[5][0] * f0[i] + tb.b[5][1] * s.k2[i] +
                                 tb.b[5][2] * s.k3[i] + tb.b[5][3] * s.k4[i] +
                                 tb.b[5][4] * s.k5[i]);
    problem.rhs(t + tb.a[5] * h, s.ytemp, g, s.k6);

    // c_2 = c_5 = 0 and c_2 - c*_2 = 0, so those stages drop out.
    const double c1 = tb.c[0], c3 = tb.c[2], c4 = tb.c[3], c6 = tb.c[5];
    const double d1 = tb.c[0] - tb.cstar[0];
    const double d3 = tb.c[2] - tb.cstar[2];
    const double d4 = tb.c[3] - tb.cstar[3];
    const double d5 = tb.c[4] - tb.cstar[4];
    const double d6 = tb.c[5] - tb.cstar[5];
    for (std::size_t i = 0; i < n; ++i) {
        yNext[i] = y[i] + h * (c1 * f0[i] + c3 * s.k3[i] + c4 * s.k4[i] + c6 * s.k6[i]);
        yErr[i] = h * (d1 * f0[i] + d3 * s.k3[i] + d4 * s.k4[i] + d5 * s.k5[i] +
                       d6 * s.k6[i]);
    }
}

StepResult step(const OdeProblem& problem, double t, std::span<const double> y,
                std::span<const double> g, std::span<const double> f0, double h) {
    Scratch scratch;
    StepResult result{std::vector<double>(y.size()), std::vector<double>(y.size())};
    step(problem, t, y, g, f0, h, result.yNext, result.yErr, scratch);
    return result;
}

ErrorNorm errorNorm(std::span<const double> y, std::span<const double> f0,
                    std::span<const double> yErr, double h, double eps, double tiny) {
    double err = 0.0;
    bool nanFlag = false;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(yErr[i])) nanFlag = true;
        err = std::fmax(err, std::fabs(yErr[i] /
                                       (std::fabs(y[i]) + std::fabs(h * f0[i]) + tiny)));
    }
    return {err / eps, nanFlag};
}

StepAdjustment adjustStep(double h, double err, bool nanFlag, double hMin,
                          double hMax, const ToleranceSettings& tol) {
    if (err > 1.0 || !std::isfinite(err) || nanFlag) {
        const double hNew = (!std::isfinite(err) || nanFlag)
                                ? tol.p1 * h
                                : std::fmax(tol.safety * h * std::pow(err, tol.pshrnk),
                                            tol.p1 * h);
        return {false, hNew};
    }
    double hNew = (err > tol.errcon) ? tol.safety * h * std::pow(err, tol.pgrow)
                                     : 5.0 * h;
    hNew = std::fmax(hMin, std::fmin(hMax, hNew));
    return {true, hNew};
}

IntegrationStats driver(const OdeProblem& problem, double t, double tEnd,
                        std::span<double> y, std::span<const double> g,
                        const ToleranceSettings& tol, Scratch& scratch,
                        const StepObserver* observer) {
    if (!(tEnd > t)) throw InvalidInterval("rkck::driver: tEnd must exceed t");
    const std::size_t dim = y.size();
    scratch.resize(dim);

    const double hMax = std::fabs(tEnd - t);
    const double hMin = tol.hMinFloor;
    double h = 0.5 * std::fabs(tEnd - t);

    IntegrationStats stats;
    bool haveF = false;
    // A sub-ulp remainder is treated as done; the accumulation t += h can
    // otherwise leave a zero-length final step.
    while (tEnd - t > tol.uround * std::fabs(tEnd)) {
        h = std::fmin(tEnd - t, h);
        if (!haveF) {  // rejected retries reuse f(t, y)
            problem.rhs(t, y, g, scratch.f0);
            ++stats.rhsEvals;
            haveF = true;
        }
        step(problem, t, y, g, scratch.f0, h, scratch.yNext, scratch.yErr, scratch);
        stats.rhsEvals += 5;
        const ErrorNorm en = errorNorm(y, scratch.f0, scratch.yErr, h, tol.eps, tol.tiny);
        const StepAdjustment adj = adjustStep(h, en.err, en.nanFlag, hMin, hMax, tol);
        if (observer) (*observer)({t, h, 6, en.err, adj.accepted});
        if (adj.accepted) {
            t += h;
            stats.recordAcceptedStep(h);
            std::copy(scratch.yNext.begin(), scratch.yNext.end(), y.begin());
            haveF = false;
            h = adj.hNew;
        } else {
            ++stats.stepsRejected;
            if (adj.hNew < tol.hMinFloor) {  // freeze at last accepted state
                stats.underflow = true;
                break;
            }
            h = adj.hNew;
        }
    }
    return stats;
}

IntegrationStats driver(const OdeProblem& problem, double t, double tEnd,
                        std::span<double> y, std::span<const double> g,
                        const ToleranceSettings& tol) {
    Scratch scratch;
    return driver(problem, t, tEnd, y, g, tol, scratch, nullptr);
}

void integrateFixed(const OdeProblem& problem, double t0, double tEnd,
                    long numSteps, std::span<double> y, std::span<const double> g) {
    if (!(tEnd > t0) || numSteps < 1)
        throw InvalidInterval("rkck::integrateFixed: bad interval or step count");
    Scratch scratch;
    scratch.resize(y.size());
    const double h = (tEnd - t0) / static_cast<double>(numSteps);
    for (long k = 0; k < numSteps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        problem.rhs(t, y, g, scratch.f0);
        step(problem, t, y, g, scratch.f0, h, scratch.yNext, scratch.yErr, scratch);
        std::copy(scratch.yNext.begin(), scratch.yNext.end(), y.begin());
    }
}

}  // namespace batchode::rkck
