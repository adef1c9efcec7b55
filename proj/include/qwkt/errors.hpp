#pragma once

#include <stdexcept>
#include <string>

namespace qwkt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical quantity or parameter outside its valid domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration, e.g. grids that are not Nyquist-paired.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The spectrum does not invert to a correlation with a main peak at zero delay.
class MalformedSpectrumError : public Error {
 public:
  using Error::Error;
};

}  // namespace qwkt
