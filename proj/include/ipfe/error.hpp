#pragma once

#include <stdexcept>
#include <string>

namespace ipfe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation
/// (singular PSD, divergent Lambda, pole of a generating function).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Grid, order or rank mismatch between operands.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration or a violated step/sampling guard.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Quadrature non-convergence, singular matrices.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Broken internal invariant (e.g. a screen that lost Hermitian symmetry).
class ConsistencyError : public Error {
public:
  using Error::Error;
};

/// Malformed binary array file.
class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace ipfe
