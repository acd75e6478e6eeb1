#include "batchode/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace batchode::problems {

OdeProblem pleiades() {
    OdeProblem p;
    p.dim = kPleiadesDim;
    p.paramDim = 0;
    p.rhs = [](double, std::span<const double> w, std::span<const double>,
               std::span<double> out) {
        const double* x = w.data();
        const double* y = w.data() + 7;
        for (int i = 0; i < 14; ++i) out[i] = w[14 + i];
        for (int i = 14; i < 28; ++i) out[i] = 0.0;
        // Pairwise gravitational pulls, masses m_i = i + 1; the action and
        // reaction contributions share one distance evaluation.
        for (int i = 0; i < 7; ++i) {
            for (int j = i + 1; j < 7; ++j) {
                const double dx = x[j] - x[i];
                const double dy = y[j] - y[i];
                const double r2 = dx * dx + dy * dy;
                const double invR3 = 1.0 / (r2 * std::sqrt(r2));
                const double mi = static_cast<double>(i + 1);
                const double mj = static_cast<double>(j + 1);
                out[14 + i] += mj * dx * invR3;
                out[21 + i] += mj * dy * invR3;
                out[14 + j] -= mi * dx * invR3;
                out[21 + j] -= mi * dy * invR3;
            }
        }
    };
    return p;
}

std::array<double, kPleiadesDim> loadPleiadesInitialConditions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open Pleiades initial-condition file: " + path);
    std::array<double, kPleiadesDim> ic{};
    for (int i = 0; i < kPleiadesDim; ++i) {
        if (!(in >> ic[i]))
            throw IoError("Pleiades initial-condition file ends early or is "
                          "non-numeric at line " + std::to_string(i + 1) + ": " + path);
    }
    double extra;
    if (in >> extra)
        throw IoError("Pleiades initial-condition file has more than 28 values: " + path);
    return ic;
}

std::uint64_t fnv1aFileChecksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for checksum: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char byte;
    while (in.get(byte)) {
        hash ^= static_cast<unsigned char>(byte);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

double pleiadesEnergy(std::span<const double> w) {
    double kinetic = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double m = static_cast<double>(i + 1);
        kinetic += 0.5 * m * (w[14 + i] * w[14 + i] + w[21 + i] * w[21 + i]);
    }
    double potential = 0.0;
    for (int i = 0; i < 7; ++i) {
        for (int j = i + 1; j < 7; ++j) {
            const double dx = w[i] - w[j];
            const double dy = w[7 + i] - w[7 + j];
            potential -= static_cast<double>(i + 1) * static_cast<double>(j + 1) /
                         std::sqrt(dx * dx + dy * dy);
        }
    }
    return kinetic + potential;
}

std::array<double, 2> pleiadesMomentum(std::span<const double> w) {
    double px = 0.0, py = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double m = static_cast<double>(i + 1);
        px += m * w[14 + i];
        py += m * w[21 + i];
    }
    return {px, py};
}

OdeProblem heatEquation(int interiorPoints) {
    if (interiorPoints < 2)
        throw InvalidShape("heatEquation: need at least two interior points");
    OdeProblem p;
    p.dim = interiorPoints;
    p.paramDim = 0;
    const double dx = 1.0 / (interiorPoints + 1);
    const double invDx2 = 1.0 / (dx * dx);
    p.rhs = [invDx2](double, std::span<const double> u, std::span<const double>,
                     std::span<double> out) {
        const std::size_t n = u.size();
        out[0] = (-2.0 * u[0] + u[1]) * invDx2;
        for (std::size_t i = 1; i + 1 < n; ++i)
            out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * invDx2;
        out[n - 1] = (u[n - 2] - 2.0 * u[n - 1]) * invDx2;
    };
    const double sigma = heatSpectralRadius(interiorPoints);
    p.specRadHint = [sigma](double, std::span<const double>, std::span<const double>) {
        return sigma;
    };
    return p;
}

double heatSpectralRadius(int interiorPoints) {
    const double n = static_cast<double>(interiorPoints);
    const double dx = 1.0 / (n + 1.0);
    const double s = std::sin(n * M_PI / (2.0 * (n + 1.0)));
    return 4.0 / (dx * dx) * s * s;
}

std::vector<double> heatInitialCondition(int interiorPoints) {
    std::vector<double> u(interiorPoints);
    const double dx = 1.0 / (interiorPoints + 1);
    for (int i = 0; i < interiorPoints; ++i) {
        const double x = (i + 1) * dx;
        u[i] = 4.0 * x * (1.0 - x);
    }
    return u;
}

OdeProblem expDecay() {
    OdeProblem p;
    p.dim = 1;
    p.paramDim = 1;
    p.rhs = [](double, std::span<const double> y, std::span<const double> g,
               std::span<double> out) { out[0] = -g[0] * y[0]; };
    p.specRadHint = [](double, std::span<const double>, std::span<const double> g) {
        return std::fabs(g[0]);
    };
    return p;
}

OdeProblem harmonic() {
    OdeProblem p;
    p.dim = 2;
    p.paramDim = 0;
    p.rhs = [](double, std::span<const double> y, std::span<const double>,
               std::span<double> out) {
        out[0] = y[1];
        out[1] = -y[0];
    };
    return p;
}

std::uint64_t splitmix64At(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t z = seed + (k + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double unitSymmetricAt(std::uint64_t seed, std::uint64_t k) {
    // Top 53 bits give a uniform draw in [0, 1); rescale to [-1, 1).
    const double u01 = static_cast<double>(splitmix64At(seed, k) >> 11) * 0x1.0p-53;
    return 2.0 * u01 - 1.0;
}

BatchStates perturbInitialConditions(std::span<const double> base, double magnitude,
                                     std::uint64_t seed, int count) {
    if (count < 1) throw InvalidShape("perturbInitialConditions: count must be positive");
    if (base.empty()) throw InvalidShape("perturbInitialConditions: empty base state");
    if (!(magnitude >= 0.0 && magnitude <= 0.1))
        throw InvalidShape("perturbInitialConditions: magnitude outside [0, 0.1]");
    BatchStates batch;
    batch.numSystems = count;
    batch.dim = static_cast<int>(base.size());
    batch.paramDim = 0;
    batch.values.resize(static_cast<std::size_t>(count) * base.size());
    for (int i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < base.size(); ++j) {
            const std::uint64_t k = static_cast<std::uint64_t>(i) * base.size() + j;
            const double u = unitSymmetricAt(seed, k);
            batch.values[static_cast<std::size_t>(i) + static_cast<std::size_t>(count) * j] =
                base[j] * (1.0 + u * magnitude);
        }
    }
    return batch;
}

}  // namespace batchode::problems
