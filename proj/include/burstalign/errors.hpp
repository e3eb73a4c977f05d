#pragma once

#include <stdexcept>
#include <string>

namespace burstalign {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid sizes that do not agree, or that violate a tiling requirement.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Numeric argument outside its admissible domain (negative sigma, T <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Invalid SearchConfig / CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace burstalign
