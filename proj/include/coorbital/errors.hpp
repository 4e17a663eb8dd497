#pragma once

#include <stdexcept>
#include <string>

namespace coorbital {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two ring points closer than the collision threshold.
class CollisionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation not supported for this input (e.g. kernel dimension >= 3).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Interval evaluation could not decide a sign.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

class CertificationError : public Error {
 public:
  using Error::Error;
};

/// The kernel of F contains no vector with all masses positive.
class NoPositiveMassError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace coorbital
