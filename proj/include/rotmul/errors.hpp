#pragma once

#include <stdexcept>
#include <string>

namespace rotmul {

/// Bad user input: malformed files, out-of-range parameters, violated
/// preconditions. The CLI maps it to exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed: nonconvergence, loss of definiteness, sign
/// violations detected during assembly. The CLI maps it to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rotmul
