#pragma once

#include <stdexcept>
#include <string>

namespace xnet {

// Base for all library errors so callers can catch one type at the CLI edge.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad dimensions, empty vectors, mismatched sizes.
struct InvalidInput : Error {
    using Error::Error;
};

// A preorder encoding that does not parse back into a tree.
struct MalformedEncoding : Error {
    using Error::Error;
};

// API called out of order (e.g. backward without a fresh forward).
struct ContractViolation : Error {
    using Error::Error;
};

// Bad TrainConfig / dataset combination, unknown config key, bad CLI flag value.
struct ConfigError : Error {
    using Error::Error;
};

// R^2 on a constant target vector.
struct UndefinedDenominator : Error {
    using Error::Error;
};

namespace io {

struct FileNotFound : Error {
    using Error::Error;
};

struct MissingColumn : Error {
    using Error::Error;
};

struct NoUsableRows : Error {
    using Error::Error;
};

} // namespace io

} // namespace xnet
