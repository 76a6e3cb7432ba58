#pragma once

#include <stdexcept>
#include <string>

namespace rectree {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or missing input data (files, schemas, CSV cells).
struct DataError : Error {
    using Error::Error;
};

// A brute-force operation was asked to enumerate a space beyond its limit.
struct CapacityError : Error {
    using Error::Error;
};

// A documented precondition was violated by the caller.
struct PreconditionError : Error {
    using Error::Error;
};

}  // namespace rectree
