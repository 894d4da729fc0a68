#pragma once

#include <stdexcept>

namespace kfree {

// A request exceeds a configured memory or enumeration ceiling.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside an operation's domain (out-of-range index,
// non-squarefree where squarefree is required, point not in the support, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace kfree
