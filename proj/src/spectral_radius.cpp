#include "batchode/spectral_radius.hpp"

#include <cmath>

namespace batchode::specrad {

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

Result powerMethod(const OdeProblem& problem, double t, std::span<const double> y,
                   std::span<const double> g, std::span<const double> f0,
                   double hMax, std::span<const double> vWarm) {
    const std::size_t n = y.size();
    if (vWarm.size() != n)
        throw InvalidShape("specrad::powerMethod: warm vector length mismatch");
    constexpr int kItMax = 50;
    constexpr double kUround = 2.22e-16;
    const double sqrtU = std::sqrt(kUround);
    const double small = 1.0 / hMax;

    std::vector<double> v(vWarm.begin(), vWarm.end());
    std::vector<double> fv(n);

    // Seed the perturbed vector; the magnitude dynrm keeps v - y within the
    // linearization range of f around y.
    const double nrmY = norm2(y);
    const double nrmV = norm2(v);
    double dynrm;
    if (nrmY != 0.0 && nrmV != 0.0) {
        dynrm = nrmY * sqrtU;
        for (std::size_t i = 0; i < n; ++i) v[i] = y[i] + v[i] * (dynrm / nrmV);
    } else if (nrmY != 0.0) {
        dynrm = nrmY * sqrtU;
        for (std::size_t i = 0; i < n; ++i) v[i] = y[i] * (1.0 + sqrtU);
    } else if (nrmV != 0.0) {
        dynrm = kUround;
        for (std::size_t i = 0; i < n; ++i) v[i] *= dynrm / nrmV;
    } else {
        dynrm = kUround;
        for (std::size_t i = 0; i < n; ++i) v[i] = kUround;
    }

    Result result;
    double sigma = 0.0;
    for (int iter = 1; iter <= kItMax; ++iter) {
        problem.rhs(t, v, g, fv);
        result.iterations = iter;

        double diffNrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = fv[i] - f0[i];
            diffNrm += d * d;
        }
        diffNrm = std::sqrt(diffNrm);

        const double sigmaOld = sigma;
        sigma = diffNrm / dynrm;
        if (iter >= 2 &&
            std::fabs(sigma - sigmaOld) <= std::fmax(sigma, small) * 0.01) {
            result.converged = true;
            break;
        }

        if (diffNrm != 0.0) {
            for (std::size_t i = 0; i < n; ++i)
                v[i] = y[i] + (fv[i] - f0[i]) * (dynrm / diffNrm);
        } else {
            // Degenerate direction: flip one component about y to escape.
            const std::size_t ind = static_cast<std::size_t>(iter) % n;
            v[ind] = y[ind] - (v[ind] - y[ind]);
        }
    }

    result.sigma = 1.2 * sigma;
    for (std::size_t i = 0; i < n; ++i) v[i] -= y[i];
    result.eigenvector = std::move(v);
    return result;
}

double gershgorinBound(const std::vector<std::vector<double>>& jacobian) {
    const std::size_t n = jacobian.size();
    double bound = 0.0;
    for (const auto& row : jacobian) {
        if (row.size() != n)
            throw InvalidShape("specrad::gershgorinBound: matrix is not square");
        double rowSum = 0.0;
        for (double x : row) rowSum += std::fabs(x);
        bound = std::fmax(bound, rowSum);
    }
    return bound;
}

}  // namespace batchode::specrad
