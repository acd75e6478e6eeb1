#pragma once

#include <stdexcept>

namespace batchode {

// Malformed or inconsistent array/matrix dimensions.
struct InvalidShape : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Empty or reversed integration interval, or non-positive step.
struct InvalidInterval : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested RKC stage count below the two-stage minimum.
struct InvalidStageCount : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad benchmark configuration (unknown problem, mode mismatch, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace batchode
