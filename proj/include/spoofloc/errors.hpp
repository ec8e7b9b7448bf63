// Error types shared across the library.
//
// std::invalid_argument is used for contract violations (bad dimensions,
// out-of-range parameters). FormatError covers malformed or semantically
// invalid input data; NumericError covers runtime numeric failures such as
// a non-finite training loss.
#pragma once

#include <stdexcept>
#include <string>

namespace spoofloc {

class FormatError : public std::runtime_error {
public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spoofloc
