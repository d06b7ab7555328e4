#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bpdn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid solver, generator or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Metric evaluated on inputs outside its domain (e.g. zero-norm truth).
class MetricError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Instance file parsed but its content violates the schema or invariants.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A non-finite intermediate inside a kernel; `row` is the measurement index.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Solver state became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t iter, std::size_t coordinate)
        : Error(what + " at iteration " + std::to_string(iter) + ", coordinate " +
                std::to_string(coordinate)),
          iter_(iter),
          coordinate_(coordinate) {}

    std::size_t iter() const noexcept { return iter_; }
    std::size_t coordinate() const noexcept { return coordinate_; }

private:
    std::size_t iter_;
    std::size_t coordinate_;
};

/// Test oracle could not produce a value (singular matrix, zero normalizer, ...).
class OracleError : public Error {
public:
    using Error::Error;
};

}  // namespace bpdn
