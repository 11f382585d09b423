#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jpow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TowerLimitExceeded : public Error {
public:
    TowerLimitExceeded(unsigned requested, unsigned limit)
        : Error("extension degree " + std::to_string(requested) + " exceeds tower limit " +
                std::to_string(limit)),
          requested_(requested),
          limit_(limit) {}
    unsigned requested() const noexcept { return requested_; }
    unsigned limit() const noexcept { return limit_; }

private:
    unsigned requested_;
    unsigned limit_;
};

class DivisionByZero : public Error {
public:
    DivisionByZero() : Error("division by zero") {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class CharacteristicMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class NotInvertible : public Error {
public:
    NotInvertible() : Error("matrix is not invertible") {}
};

class NotDiagonalizable : public Error {
public:
    NotDiagonalizable() : Error("matrix is not diagonalizable") {}
};

class NotPotent : public Error {
public:
    using Error::Error;
};

class NotOrthogonal : public Error {
public:
    NotOrthogonal(std::size_t first, std::size_t second)
        : Error("parts " + std::to_string(first) + " and " + std::to_string(second) +
                " are not orthogonal"),
          first_(first),
          second_(second) {}
    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class ZeroSeed : public Error {
public:
    ZeroSeed() : Error("simplicity witness requires a nonzero seed") {}
};

/// Raised by the certificate builder when one of the auxiliary matrices does not
/// have the Jordan structure the construction relies on. Indicates a bug.
class NotDiagonalizableAuxiliary : public Error {
public:
    using Error::Error;
};

class UnrepresentableOmega : public Error {
public:
    using Error::Error;
};

class DegenerateOracle : public Error {
public:
    DegenerateOracle(std::string condition, std::string detail)
        : Error("degenerate oracle: " + condition + ": " + detail), condition_(std::move(condition)) {}
    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

}  // namespace jpow
