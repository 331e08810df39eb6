#pragma once

#include <stdexcept>
#include <string>

namespace medsynth {

// Dimension/shape mismatches (matrix-vector products, cache/layer counts,
// model files whose weight blocks disagree with their declared sizes).
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data or files: CSV headers, JSON documents, unsupported
// format versions, invalid toy-spec probabilities.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failures: non-finite losses, NaN gradients, non-convergent
// iterations.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace medsynth
