#pragma once

#include <stdexcept>
#include <string>

namespace sbt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of a generator, scaler or map.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch, non-square or non-symmetric matrix input.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument value (empty sample list, zero epochs, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The scaled identity was requested for a (generator, scaler) pair that
/// is neither affine nor restricted positive homogeneous at the points.
class IdentityPreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Model fitting could not proceed (e.g. single-class data).
class FitError : public Error {
 public:
  using Error::Error;
};

/// A theoretical guarantee was requested outside of its parameter regime.
class OutOfRegimeError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbt
