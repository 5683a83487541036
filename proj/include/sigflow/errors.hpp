#pragma once

#include <stdexcept>
#include <string>

namespace sigflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: scene files, invariant violations, bad arguments.
struct InputError : Error {
    using Error::Error;
};

// A query point that is not strictly inside the domain.
struct DomainError : Error {
    using Error::Error;
};

// The integrator could not continue a generalized characteristic.
struct FlowError : Error {
    using Error::Error;
};

} // namespace sigflow
