#include "stein_gauge/errors.hpp"

namespace stein_gauge::detail {

void throw_input(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

void throw_numeric(const std::string& where, const std::string& what) {
  throw NumericError(where + ": " + what);
}

}  // namespace stein_gauge::detail
