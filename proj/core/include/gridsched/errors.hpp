#pragma once

#include <stdexcept>
#include <string>

namespace gridsched {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (case, modification list, config, dataset).
class ParseError : public Error {
public:
    using Error::Error;
};

/// An input parsed but violates a domain invariant. `path` names the
/// offending field, e.g. `lines[3].to_bus`.
class ValidationError : public Error {
public:
    ValidationError(std::string path, const std::string& what);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// The in-service network leaves a load-carrying bus without a reference.
class SingularTopologyError : public Error {
public:
    using Error::Error;
};

/// Iteration cap hit or a numerically unusable pivot.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Problem exceeds a configured enumeration or storage limit.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// An operational subproblem has no feasible solution.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

class InfeasibleWindowError : public Error {
public:
    using Error::Error;
};

class MissingTopologyError : public Error {
public:
    using Error::Error;
};

class OracleDriftError : public Error {
public:
    using Error::Error;
};

}  // namespace gridsched
