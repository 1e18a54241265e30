#pragma once

#include <stdexcept>
#include <string>

namespace afs {

// Base of the pipeline error hierarchy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration or command-line usage. CLI exit code 1.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data. CLI exit code 2.
struct DataError : Error {
  using Error::Error;
};

// A required resource (file, cache entry, service) is unavailable. CLI exit code 3.
struct MissingResourceError : Error {
  using Error::Error;
};

}  // namespace afs
