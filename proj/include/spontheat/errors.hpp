#pragma once

#include <stdexcept>
#include <string>

namespace spontheat {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arithmetic between incompatible dimensions, or a non-finite value.
struct DimensionError : Error {
  using Error::Error;
};

// Parameter outside its validity range, inconsistent configuration,
// or an unstable numerical setup that was refused before running.
struct ValidationError : Error {
  using Error::Error;
};

// File or stream problems.
struct IoError : Error {
  using Error::Error;
};

}  // namespace spontheat
