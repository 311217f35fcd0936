#pragma once

#include <stdexcept>
#include <string>

namespace monsel {

/// Bad input: malformed files, invalid configuration, precondition violations
/// on user-supplied values. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure inside a numerical routine (singular system, degenerate weights,
/// sampler not converging). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] void throw_input(const std::string& where, const std::string& msg);
[[noreturn]] void throw_numerical(const std::string& where, const std::string& msg);

}  // namespace monsel
