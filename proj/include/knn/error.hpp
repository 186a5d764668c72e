#pragma once

#include <stdexcept>
#include <string>

namespace knn {

// Exit-code mapping lives in the CLI: validation -> 1, numerical -> 2, io -> 3.

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace knn
