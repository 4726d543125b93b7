#ifndef PATHWAYS_ERRORS_HPP
#define PATHWAYS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pathways {

// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Input that parses but violates an ordering/shape invariant.
class StructuralError : public ParseError {
public:
    using ParseError::ParseError;
};

// Scenario / parameter validation failure.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Too few observations for an estimator.
class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Mathematical domain violation (moment conditions, non-finite input, r <= gamma, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Numerical procedure failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pathways

#endif // PATHWAYS_ERRORS_HPP
