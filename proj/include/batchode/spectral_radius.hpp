#pragma once

#include <span>
#include <vector>

#include "batchode/ode_problem.hpp"

// Jacobian-free nonlinear power method for the spectral radius of df/dy,
// plus a Gershgorin row-sum bound used as a test oracle.
namespace batchode::specrad {

struct Result {
    double sigma = 0.0;  // estimate including the 1.2 safety factor
    std::vector<double> eigenvector;  // v - y difference, for warm starts
    bool converged = false;
    int iterations = 0;  // power iterations taken == rhs evaluations
};

// Estimates the spectral radius at (t, y). f0 must hold rhs(t, y, g).
// vWarm seeds the iteration direction (a zero vector falls back to a
// perturbation of y). Convergence: successive estimates within 1% of
// max(sigma, 1/hMax), checked from the second iteration; at most 50
// iterations, after which the last estimate is returned unconverged.
// Inputs are never mutated.
Result powerMethod(const OdeProblem& problem, double t, std::span<const double> y,
                   std::span<const double> g, std::span<const double> f0,
                   double hMax, std::span<const double> vWarm);

// max_i sum_j |J_ij|, an upper bound on the spectral radius.
// Throws InvalidShape for a non-square matrix.
double gershgorinBound(const std::vector<std::vector<double>>& jacobian);

}  // namespace batchode::specrad
