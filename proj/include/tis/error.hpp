#pragma once

#include <stdexcept>
#include <string>

namespace tis {

// All recoverable failures in the library surface as tis::Error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tis
