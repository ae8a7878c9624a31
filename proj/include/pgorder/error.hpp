#pragma once

#include <stdexcept>
#include <string>

namespace pgorder {

// Raised for malformed inputs and failed runtime checks across the library.
// Precondition violations by the caller use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pgorder
