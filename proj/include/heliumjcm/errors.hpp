#pragma once

#include <stdexcept>
#include <string>

namespace heliumjcm {

// Base of every error raised by the library. Callers that only care about
// "the computation failed" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested a quantity that needs B_z > 0 (magnetic length, coupling).
class DegenerateField : public Error {
public:
    using Error::Error;
};

class GridTooSmall : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

class BasisMismatch : public Error {
public:
    using Error::Error;
};

class NoCrossingInRange : public Error {
public:
    using Error::Error;
};

class BranchTrackingLost : public Error {
public:
    using Error::Error;
};

// Perturbative formula evaluated too close to a level crossing.
class NearResonance : public Error {
public:
    using Error::Error;
};

class NotDownward : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace heliumjcm
