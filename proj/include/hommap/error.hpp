#pragma once

#include <stdexcept>
#include <string>

namespace hommap {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

class NonInvertibleError : public Error {
public:
    using Error::Error;
};

/// Origin is not a real saddle (2-D) or not hyperbolic with a 2+2 splitting (4-D).
class NonHyperbolicError : public Error {
public:
    using Error::Error;
};

/// A coefficient system became singular; `order` names the offending monomial.
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& what, int n, int m = -1)
        : Error(what), n_(n), m_(m) {}
    int n() const noexcept { return n_; }
    int m() const noexcept { return m_; }

private:
    int n_;
    int m_;
};

class SymmetryNotApplicableError : public Error {
public:
    using Error::Error;
};

class NoConvergenceError : public Error {
public:
    using Error::Error;
};

class TrivialRootError : public Error {
public:
    using Error::Error;
};

class OutsideValidityError : public Error {
public:
    OutsideValidityError(const std::string& what, double radius)
        : Error(what), radius_(radius) {}
    /// Radius along the offending ray at which the defining-equation error first exceeded the bound.
    double radius() const noexcept { return radius_; }

private:
    double radius_;
};

class CannotBeginError : public Error {
public:
    using Error::Error;
};

class FitInvalidError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace hommap
