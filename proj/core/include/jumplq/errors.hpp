#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace jumplq {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteCoefficient : public Error {
public:
    using Error::Error;
};

class InvalidIntensity : public Error {
public:
    using Error::Error;
};

class InvalidHorizon : public Error {
public:
    using Error::Error;
};

class TimeOutOfRange : public Error {
public:
    using Error::Error;
};

/// A simulated state exceeded the overflow guard (or became non-finite).
class StateBlowUp : public Error {
public:
    StateBlowUp(const std::string& what, double time, std::int64_t path_index)
        : Error(what), time(time), path_index(path_index) {}
    double time = 0.0;
    std::int64_t path_index = -1;  // -1 when not raised inside a Monte Carlo run
};

/// The aggregated control weight lost uniform positivity during a Riccati
/// solve, or the solution norm exceeded the overflow guard.
class RiccatiBlowUp : public Error {
public:
    RiccatiBlowUp(const std::string& what, double time, double min_eig)
        : Error(what), time(time), min_eig(min_eig) {}
    double time = 0.0;
    double min_eig = 0.0;
};

class StructureViolation : public Error {
public:
    using Error::Error;
};

class InvalidQ0 : public Error {
public:
    using Error::Error;
};

class UnknownExample : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace jumplq
