#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

// Argument outside the domain of a function (z > 1, s <= 0, n < 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Gamma (or a Pochhammer denominator) evaluated at a nonpositive integer.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

// A series or adaptive rule ran out of its budget before meeting tolerance.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One of the sufficient conditions of a counterexample certificate failed.
class CertificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail
} // namespace fraclap
