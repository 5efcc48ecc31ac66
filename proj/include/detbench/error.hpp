#pragma once

#include <stdexcept>
#include <string>

namespace detbench {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Region whose shape matrix is not symmetric positive-definite.
struct InvalidRegionError : Error {
  using Error::Error;
};

// Point maps to (or too close to) the horizon line of a projective map.
struct DegenerateWarpError : Error {
  using Error::Error;
};

// Out-of-range argument (gamma <= 0, domain too small, ...).
struct InvalidParameterError : Error {
  using Error::Error;
};

// Malformed input file; message names the file and offending location.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid input that violates a cross-field constraint.
struct ValidationError : Error {
  using Error::Error;
};

// Download or checksum failure while fetching dataset files.
struct FetchError : Error {
  using Error::Error;
};

}  // namespace detbench
