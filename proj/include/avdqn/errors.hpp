#pragma once

#include <stdexcept>
#include <string>

namespace avdqn {

// Caller broke a documented precondition (shape mismatch, stale tape,
// stepping a finished episode, bad index, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Not enough stored data to satisfy a request (e.g. replay smaller than batch).
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace avdqn
