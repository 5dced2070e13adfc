#pragma once

#include <stdexcept>
#include <string>

namespace sysrate {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes do not line up (non-square where square is required, size mismatch).
class StructuralError : public Error {
public:
    using Error::Error;
};

// Invalid argument values: NaN/Inf, negative distortion, negative dt, ...
class InputError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

// The Lyapunov equation has no unique (stabilizing) solution.
class NoEquilibrium : public Error {
public:
    using Error::Error;
};

// A fast-path formula was called outside its domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Target increment lies outside the conic hull of the source family.
class Infeasible : public Error {
public:
    using Error::Error;
};

// Channel capacity cannot be met even at the fastest probed sampling rate.
class CapacityInfeasible : public Error {
public:
    using Error::Error;
};

}  // namespace sysrate
