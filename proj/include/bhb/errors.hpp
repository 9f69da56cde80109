#ifndef BHB_ERRORS_HPP
#define BHB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bhb {

/// Argument outside the mathematical domain of an operation (e.g. negative coordinate).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Dimension or size constraint violated.
class SizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical self-consistency check failed (imaginary energy residue, non-scalar
/// anticommutator, zero normalization, eigensolver failure).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No admissible exponential-growth window in an OTOC series.
class FitWindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range experiment configuration. The message carries the key path.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace bhb

#endif // BHB_ERRORS_HPP
