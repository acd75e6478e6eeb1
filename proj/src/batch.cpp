#include "batchode/batch.hpp"

#include <cstddef>
#include <string>

namespace batchode {

void BatchStates::validate() const {
    if (numSystems < 1 || dim < 1)
        throw InvalidShape("BatchStates: numSystems and dim must be positive");
    if (paramDim < 0) throw InvalidShape("BatchStates: negative paramDim");
    const auto expectValues =
        static_cast<std::size_t>(numSystems) * static_cast<std::size_t>(dim);
    if (values.size() != expectValues)
        throw InvalidShape("BatchStates: values length " + std::to_string(values.size()) +
                           " != numSystems*dim = " + std::to_string(expectValues));
    const auto expectParams =
        static_cast<std::size_t>(numSystems) * static_cast<std::size_t>(paramDim);
    if (params.size() != expectParams)
        throw InvalidShape("BatchStates: params length " + std::to_string(params.size()) +
                           " != numSystems*paramDim = " + std::to_string(expectParams));
}

BatchStates pack(const std::vector<std::vector<double>>& states,
                 const std::vector<std::vector<double>>& params) {
    if (states.empty()) throw InvalidShape("pack: no systems");
    const std::size_t dim = states.front().size();
    if (dim == 0) throw InvalidShape("pack: zero-dimensional state");
    for (const auto& v : states)
        if (v.size() != dim) throw InvalidShape("pack: ragged state vectors");
    if (!params.empty() && params.size() != states.size())
        throw InvalidShape("pack: params count differs from state count");
    const std::size_t paramDim = params.empty() ? 0 : params.front().size();
    for (const auto& p : params)
        if (p.size() != paramDim) throw InvalidShape("pack: ragged parameter vectors");

    BatchStates batch;
    batch.numSystems = static_cast<int>(states.size());
    batch.dim = static_cast<int>(dim);
    batch.paramDim = static_cast<int>(paramDim);
    batch.values.resize(states.size() * dim);
    batch.params.resize(states.size() * paramDim);
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = 0; j < dim; ++j)
            batch.values[i + states.size() * j] = states[i][j];
        for (std::size_t j = 0; j < paramDim; ++j)
            batch.params[i + states.size() * j] = params[i][j];
    }
    return batch;
}

std::vector<std::vector<double>> unpack(const BatchStates& batch) {
    batch.validate();
    std::vector<std::vector<double>> out(batch.numSystems,
                                         std::vector<double>(batch.dim));
    for (int i = 0; i < batch.numSystems; ++i)
        for (int j = 0; j < batch.dim; ++j) out[i][j] = batch.at(i, j);
    return out;
}

void fillParams(BatchStates& batch, std::span<const double> g) {
    batch.paramDim = static_cast<int>(g.size());
    batch.params.resize(static_cast<std::size_t>(batch.numSystems) * g.size());
    for (int i = 0; i < batch.numSystems; ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            batch.params[static_cast<std::size_t>(i) + batch.numSystems * j] = g[j];
}

}  // namespace batchode
