#include "monsel/errors.hpp"

namespace monsel {

void throw_input(const std::string& where, const std::string& msg) {
  throw InputError(where + ": " + msg);
}

void throw_numerical(const std::string& where, const std::string& msg) {
  throw NumericalError(where + ": " + msg);
}

}  // namespace monsel
