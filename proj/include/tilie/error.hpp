#pragma once

#include <stdexcept>
#include <string>

namespace tilie {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operands built over different lattices (or different sectors) were mixed.
struct LatticeMismatchError : Error {
    using Error::Error;
};

struct SectorError : Error {
    using Error::Error;
};

// Dense realization would exceed the configured size cap.
struct SizeCapError : Error {
    using Error::Error;
};

// Malformed or inconsistent user input (configs, representation constraints).
struct ValidationError : Error {
    using Error::Error;
};

// A group invariant (orthogonality, symplecticity, unitarity) drifted too far.
struct NumericalHealthError : Error {
    using Error::Error;
};

// The requested witness cannot exist for the given seed class.
struct NoWitnessError : Error {
    using Error::Error;
};

// The target lies outside the family a synthesis routine guarantees.
struct UnsupportedTargetError : Error {
    using Error::Error;
};

// Machine-integer fast path exceeded; callers may retry with big integers.
struct IntOverflowError : Error {
    using Error::Error;
};

struct DepthError : Error {
    using Error::Error;
};

}  // namespace tilie
