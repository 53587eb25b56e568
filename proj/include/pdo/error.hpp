#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdo {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition (bad damping, taps, counts...).
struct InvalidParameter : Error {
    using Error::Error;
};

/// Damping at or beyond the critical value; the oscillatory model does not apply.
struct Overdamped : InvalidParameter {
    using InvalidParameter::InvalidParameter;
};

/// The simulated state stopped being finite. Carries the sample index at which
/// the check tripped.
struct Diverged : Error {
    Diverged(std::size_t sample_index, const std::string& what)
        : Error(what), sample(sample_index) {}
    std::size_t sample;
};

/// An experiment spec (config file or flags) is malformed or contradictory.
/// Maps to process exit code 2.
struct SpecError : Error {
    using Error::Error;
};

/// Filesystem failure while emitting results. Maps to process exit code 1.
struct IoError : Error {
    using Error::Error;
};

}  // namespace pdo
