#pragma once

#include <stdexcept>
#include <string>

namespace agot {

// Error taxonomy used across the library. Each class maps to one failure
// family so tests and the CLI can tell them apart.

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape or width disagreement between tensors/parameters.
struct DimensionError : Error {
    using Error::Error;
};

// An API precondition was violated (non-scalar loss, missing gradient, ...).
struct ContractError : Error {
    using Error::Error;
};

// Invalid configuration value or inconsistent config/data combination.
struct ConfigError : Error {
    using Error::Error;
};

// Numerically degenerate input (near-zero norm before normalization).
struct DegenerateInputError : Error {
    using Error::Error;
};

// Empty input where at least one element is required.
struct EmptyInputError : Error {
    using Error::Error;
};

// Token id outside the vocabulary, or a required token is missing.
struct VocabError : Error {
    using Error::Error;
};

// Index out of range (class targets, rows).
struct IndexError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Dataset-level problem (missing class, not enough examples, ...).
struct DataError : Error {
    using Error::Error;
};

// Malformed text input; message carries the line number where known.
struct ParseError : Error {
    using Error::Error;
};

// Recognized file but unsupported version or layout.
struct FormatError : Error {
    using Error::Error;
};

// Corrupt or truncated binary artifact (checkpoint).
struct IntegrityError : Error {
    using Error::Error;
};

// Loss or gradient became non-finite during training.
struct NumericsError : Error {
    using Error::Error;
};

// A grid finished with one or more failed cells.
struct PartialResultError : Error {
    using Error::Error;
};

}  // namespace agot
