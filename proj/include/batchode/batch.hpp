#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "batchode/errors.hpp"

namespace batchode {

// Flat interleaved storage for numSystems independent state vectors.
// Variable j of system i lives at flat index i + numSystems * j, so that
// the same variable of consecutive systems is adjacent in memory.
// The parameter vectors use the same interleaving.
struct BatchStates {
    int numSystems = 0;
    int dim = 0;
    int paramDim = 0;
    std::vector<double> values;  // numSystems * dim
    std::vector<double> params;  // numSystems * paramDim

    double& at(int system, int var) {
        return values[static_cast<std::size_t>(system) +
                      static_cast<std::size_t>(numSystems) * var];
    }
    double at(int system, int var) const {
        return values[static_cast<std::size_t>(system) +
                      static_cast<std::size_t>(numSystems) * var];
    }

    void gatherState(int system, std::span<double> out) const {
        for (int j = 0; j < dim; ++j) out[j] = at(system, j);
    }
    void scatterState(int system, std::span<const double> in) {
        for (int j = 0; j < dim; ++j) at(system, j) = in[j];
    }
    void gatherParams(int system, std::span<double> out) const {
        for (int j = 0; j < paramDim; ++j)
            out[j] = params[static_cast<std::size_t>(system) +
                            static_cast<std::size_t>(numSystems) * j];
    }

    // Throws InvalidShape if the flat arrays do not match the declared shape.
    void validate() const;
};

// Interleaves per-system state vectors (and optionally parameter vectors)
// into a BatchStates. All state vectors must share one length; ragged input
// throws InvalidShape. pack followed by unpack is the identity, bitwise.
BatchStates pack(const std::vector<std::vector<double>>& states,
                 const std::vector<std::vector<double>>& params = {});

// Inverse of pack for the state array.
std::vector<std::vector<double>> unpack(const BatchStates& batch);

// Assigns the same parameter vector to every system.
void fillParams(BatchStates& batch, std::span<const double> g);

}  // namespace batchode
