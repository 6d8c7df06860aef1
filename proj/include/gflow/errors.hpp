#pragma once

#include <stdexcept>
#include <string>

namespace gflow {

// Error taxonomy shared across the library. The CLI maps these onto its
// exit-code contract (2 = usage/config, 3 = runtime abort).
struct GflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number.
struct ParseError : GflowError {
    ParseError(const std::string& path, long line, const std::string& what)
        : GflowError(path + ":" + std::to_string(line) + ": " + what), line_number(line) {}
    long line_number;
};

// Structurally well-formed input that violates a domain invariant.
struct ValidationError : GflowError {
    using GflowError::GflowError;
};

// Infeasible or inconsistent configuration.
struct ConfigError : GflowError {
    using GflowError::GflowError;
};

// Tensor dimension mismatch.
struct ShapeError : GflowError {
    using GflowError::GflowError;
};

// Out-of-range node or class index.
struct IndexError : GflowError {
    using GflowError::GflowError;
};

// Violated operation precondition (empty candidate set, parents of s0, ...).
struct PreconditionError : GflowError {
    using GflowError::GflowError;
};

// Action not available in the current state.
struct InvalidActionError : GflowError {
    using GflowError::GflowError;
};

// Step attempted after the labeling budget was spent.
struct BudgetExhaustedError : GflowError {
    using GflowError::GflowError;
};

// Non-finite loss or gradient during optimization. `layer` is the offending
// parameter tensor index when known, -1 otherwise; `dump_path` points at a
// diagnostic trajectory dump when one was written.
struct TrainingError : GflowError {
    TrainingError(const std::string& what, int layer_index = -1, std::string dump = {})
        : GflowError(what), layer(layer_index), dump_path(std::move(dump)) {}
    int layer;
    std::string dump_path;
};

// Instance too large for exhaustive enumeration.
struct SizeError : GflowError {
    using GflowError::GflowError;
};

} // namespace gflow
