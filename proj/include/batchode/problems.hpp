#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "batchode/batch.hpp"
#include "batchode/ode_problem.hpp"

// Benchmark problem definitions: the Pleiades seven-star system, a stiff
// method-of-lines heat equation, and trivial calibration problems.
namespace batchode::problems {

// Pleiades: seven planar stars with masses m_i = i under Newtonian gravity.
// State layout: (x_1..x_7, y_1..y_7, x'_1..x'_7, y'_1..y'_7), 28 unknowns.
inline constexpr int kPleiadesDim = 28;
OdeProblem pleiades();

// Canonical initial conditions ship as a plain-text asset, 28 values, one
// per line, in the state-layout order above. Throws IoError when the file is
// missing or malformed.
std::array<double, kPleiadesDim> loadPleiadesInitialConditions(const std::string& path);

// FNV-1a 64-bit hash of a file's bytes; the shipped asset's expected hash is
// pinned below and verified by the test suite.
std::uint64_t fnv1aFileChecksum(const std::string& path);
inline constexpr std::uint64_t kPleiadesIcChecksum = 0x5583feb418028048ull;

// Conserved quantities of the Pleiades flow, used as drift oracles.
double pleiadesEnergy(std::span<const double> state);
// Returns (sum m_i x'_i, sum m_i y'_i).
std::array<double, 2> pleiadesMomentum(std::span<const double> state);

// 1-D heat equation on (0,1) with zero Dirichlet boundaries, discretized by
// the (1, -2, 1)/dx^2 stencil on n interior points, dx = 1/(n+1). The
// Jacobian is constant with spectral radius (4/dx^2) sin^2(n pi / (2(n+1))),
// exposed through specRadHint.
OdeProblem heatEquation(int interiorPoints);
double heatSpectralRadius(int interiorPoints);
// Benchmark initial profile u(x) = 4 x (1 - x), nonnegative with max 1.
std::vector<double> heatInitialCondition(int interiorPoints);

// dy/dt = -g0 * y (dim 1, paramDim 1).
OdeProblem expDecay();
// (q, p)' = (p, -q) (dim 2).
OdeProblem harmonic();

// Deterministic counter-based generator (SplitMix64 output function applied
// to seed + (k+1) * 2^64/phi). Same (seed, k) gives the same value on every
// platform. Exposed because perturbation batches are reproducible by
// contract.
std::uint64_t splitmix64At(std::uint64_t seed, std::uint64_t k);
// Uniform draw in [-1, 1) from the generator stream.
double unitSymmetricAt(std::uint64_t seed, std::uint64_t k);

// Batch of `count` copies of `base` with every component j of system i
// scaled by (1 + u * magnitude), u = unitSymmetricAt(seed, i*dim + j).
// magnitude must lie in [0, 0.1]. Identical (seed, count, magnitude)
// reproduce bitwise-identical batches.
BatchStates perturbInitialConditions(std::span<const double> base, double magnitude,
                                     std::uint64_t seed, int count);

}  // namespace batchode::problems
