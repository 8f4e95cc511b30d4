#pragma once

#include <stdexcept>
#include <string>

namespace sno {

// Base for errors raised while reading inputs or validating configuration.
// Argument errors use std::invalid_argument, out-of-domain probabilities use
// std::domain_error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class CorruptFileError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sno
