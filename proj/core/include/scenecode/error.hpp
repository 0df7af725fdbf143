#pragma once

#include <stdexcept>
#include <string>

namespace scenecode {

// Every recoverable failure raised by the library derives from this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scenecode
