#pragma once

#include <stdexcept>
#include <string>

namespace hclex {

// Malformed or inconsistent input data (bad files, unknown tokens,
// violated preconditions on caller-supplied values). The CLI maps this
// to exit code 3; anything else unexpected maps to 4.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hclex
