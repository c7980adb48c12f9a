#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace monofollow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain on which the operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A division by a quantity that vanished (zero volatility, flat slope denominator).
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A model or evaluator could not be built with the requested properties.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Quadrature of a payoff or special-function integral did not converge.
class IntegrabilityError : public Error {
public:
    using Error::Error;
};

/// The first-order condition has no sign change on the search grid.
class NoInteriorBarrierError : public Error {
public:
    using Error::Error;
};

/// The first-order condition has more than one root on the search grid.
class UniquenessViolatedError : public Error {
public:
    explicit UniquenessViolatedError(std::vector<double> roots);
    const std::vector<double>& roots() const noexcept { return roots_; }

private:
    std::vector<double> roots_;
};

/// Two independent routes to the same quantity disagree.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

/// Invalid run or simulation configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace monofollow
