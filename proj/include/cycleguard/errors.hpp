#pragma once

#include <stdexcept>
#include <string>

namespace cycleguard {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed source text. `offset` is the byte position of the offending token.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

class UnknownIdentifierError : public SyntaxError {
public:
    UnknownIdentifierError(const std::string& name, std::size_t offset)
        : SyntaxError("unknown identifier '" + name + "'", offset), name(name) {}
    std::string name;
};

/// Evaluation hit a point outside a sub-expression's domain
/// (sqrt of a negative, division by zero, d/dx |x| at 0).
class EvalDomainError : public Error {
public:
    using Error::Error;
};

/// Point lies outside the system's strip domain.
class OutOfDomainError : public Error {
public:
    using Error::Error;
};

class NotPolynomialError : public Error {
public:
    using Error::Error;
};

/// Default trinomial decomposition is undefined for systems with even damping terms.
class DecompositionRequiredError : public Error {
public:
    using Error::Error;
};

/// g fails x*g(x) > 0 for x != 0, or g'(0) <= 0.
class GNotAdmissibleError : public Error {
public:
    using Error::Error;
};

class KappaNotPositiveError : public Error {
public:
    using Error::Error;
};

/// |A| fell below tolerance where the angular-speed field must not vanish.
class AngularSpeedZeroError : public Error {
public:
    using Error::Error;
};

/// Orbit failed to return to the section within its step budget.
class NoReturnError : public Error {
public:
    using Error::Error;
};

class CyclesNotNestedError : public Error {
public:
    using Error::Error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

} // namespace cycleguard
