#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

// Shared helpers for the test binaries. The RNG is intentionally separate
// from the library's perturbation generator so tests stay independent.
namespace testsupport {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double logUniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    bool coin() { return (next() & 1u) != 0; }

private:
    std::uint64_t state_;
};

inline double relDiff(double a, double b) {
    return std::fabs(a - b) / std::fmax(std::fabs(b), 1e-300);
}

inline double maxAbsDiff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::fmax(m, std::fabs(a[i] - b[i]));
    return m;
}

// Least-squares slope of log(err) against log(h).
inline double logLogSlope(const std::vector<double>& h, const std::vector<double>& err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(h.size());
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(h[i]);
        const double ly = std::log(err[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testsupport
