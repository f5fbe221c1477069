#pragma once

#include <stdexcept>
#include <string>

namespace cfo {

/// A value fell outside the domain of a model function (speed outside its
/// bounds, a time outside an intensity trace, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent solver or instance configuration (empty boxes, K <= 0, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed instance or plan document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The destination cannot be reached in the extended graph.
class InfeasibleStructure : public SolverError {
public:
    using SolverError::SolverError;
};

} // namespace cfo
