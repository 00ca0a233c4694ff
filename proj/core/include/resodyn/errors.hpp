#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resodyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shapes, asymmetric matrices, out-of-range values.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Failure of a numerical procedure on otherwise valid input.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Two resonances (or their eigenvectors) are too close to coalescence for
/// the biorthogonal normalization to be meaningful.
class ExceptionalPointError : public NumericalError {
public:
    ExceptionalPointError(std::size_t first, std::size_t second, const std::string& what)
        : NumericalError(what), first_(first), second_(second) {}

    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

/// |E_n - E_m| fell below the configured tolerance in a level-spacing sum.
class SmallDenominatorError : public NumericalError {
public:
    SmallDenominatorError(std::size_t n, std::size_t m, const std::string& what)
        : NumericalError(what), n_(n), m_(m) {}

    std::size_t level() const noexcept { return n_; }
    std::size_t partner() const noexcept { return m_; }

private:
    std::size_t n_;
    std::size_t m_;
};

/// A root or extremum search found nothing to refine inside its bracket.
class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Evaluation requested at a point where a density diverges.
class SingularPointError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace resodyn
