#pragma once

#include <stdexcept>
#include <string>

namespace hfpath {

// Malformed or inconsistent input data (bad codes, CSV schema problems).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce a defined result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hfpath
