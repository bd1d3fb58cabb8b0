#pragma once

#include <stdexcept>
#include <string>

namespace qdgate {

/// Operands carry incompatible basis or frame tags.
class BasisMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A level label was not found in the basis it was looked up in.
class UnknownLabel : public std::invalid_argument {
 public:
  explicit UnknownLabel(const std::string& label)
      : std::invalid_argument("unknown basis label '" + label + "'"), label_(label) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

/// Integration or decomposition could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdgate
