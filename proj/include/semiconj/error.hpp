#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semiconj {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Root iteration did not settle within the sweep budget.
class NonConvergence : public Error {
  public:
    using Error::Error;
};

/// A value supplied as a common root of P and Q does not annihilate both.
class NotACommonRoot : public Error {
  public:
    using Error::Error;
};

/// A complex root whose argument is (numerically) 0 or pi.
class DegenerateAngle : public Error {
  public:
    using Error::Error;
};

/// rho^p == 1, so the cycle lift is undefined.
class RootOfUnity : public Error {
  public:
    using Error::Error;
};

/// Boundedness certificate requested for |rho| >= 1.
class NotContracting : public Error {
  public:
    using Error::Error;
};

/// A factorization whose coefficients do not belong to the equation.
class MismatchedFactorization : public Error {
  public:
    using Error::Error;
};

/// Malformed run configuration (bad JSON, wrong lengths, missing keys).
class ConfigError : public Error {
  public:
    using Error::Error;
};

class SyntaxError : public Error {
  public:
    SyntaxError(std::size_t offset, const std::string& expected)
        : Error("syntax error at offset " + std::to_string(offset) + ": " + expected),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

}  // namespace semiconj
