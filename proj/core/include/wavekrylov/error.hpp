#pragma once

#include <stdexcept>
#include <string>

namespace wavekrylov
{

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error
{
public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace wavekrylov
