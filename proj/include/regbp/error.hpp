#pragma once

#include <stdexcept>
#include <string>

namespace regbp {

/// Violated mathematical precondition or contract (maps to CLI exit code 1).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File access or parse failure (maps to CLI exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace regbp
