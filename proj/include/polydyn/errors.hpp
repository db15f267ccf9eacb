#pragma once

#include <stdexcept>
#include <string>

namespace polydyn {

// Bad user input: malformed JSON, unparsable numbers, dimension mismatches
// in files handed to the CLI.  Maps to exit code 1.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A requested operation is not defined for the given arguments
// (wrong coefficient domain, wrong variable count, zero polynomial where
// a value is required, ...).
struct DomainError : std::logic_error {
    explicit DomainError(const std::string& what) : std::logic_error(what) {}
};

// A polynomial operation would produce more terms than the configured ceiling.
struct TermLimitExceeded : std::runtime_error {
    explicit TermLimitExceeded(const std::string& what) : std::runtime_error(what) {}
};

// The claimed inverse of a map failed symbolic verification.
struct InverseMismatch : std::runtime_error {
    InverseMismatch(const std::string& what, int component)
        : std::runtime_error(what), component_index(component) {}
    int component_index;
};

// A pullback computation requires algebraic stability that the map lacks.
struct StabilityViolation : std::runtime_error {
    explicit StabilityViolation(const std::string& what) : std::runtime_error(what) {}
};

// Classification errors.
struct NotQuadratic : std::runtime_error {
    explicit NotQuadratic(const std::string& what) : std::runtime_error(what) {}
};
struct NotInNormalShape : std::runtime_error {
    explicit NotInNormalShape(const std::string& what) : std::runtime_error(what) {}
};
struct CoefficientDegeneracy : std::runtime_error {
    explicit CoefficientDegeneracy(const std::string& what) : std::runtime_error(what) {}
};

// Numeric escape-rate computation overflowed before the escape radius was hit.
struct EscapeOverflow : std::runtime_error {
    explicit EscapeOverflow(const std::string& what) : std::runtime_error(what) {}
};

// A module precondition failed (e.g. region verification with |b| >= 1).
struct PreconditionFailed : std::runtime_error {
    explicit PreconditionFailed(const std::string& what) : std::runtime_error(what) {}
};

// Operation defined only for specific dimensions.
struct UnsupportedDimension : std::runtime_error {
    explicit UnsupportedDimension(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polydyn
