#pragma once

#include <stdexcept>
#include <string>

namespace filtlab {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input data: bad partitions, negative masses, size mismatches.
/// Messages name the offending level/block/atom where possible.
struct ValidationError : Error {
    using Error::Error;
};

/// A requested computation would exceed a configured size cap.
struct CapacityError : Error {
    using Error::Error;
};

/// An exponent or other scalar parameter is out of range.
struct ParameterError : Error {
    using Error::Error;
};

/// A weight is zero somewhere an operation needs it positive.
struct DegenerateWeightError : Error {
    using Error::Error;
};

/// Bad command-line configuration (maps to exit code 2 in the CLI).
struct UsageError : Error {
    using Error::Error;
};

} // namespace filtlab
