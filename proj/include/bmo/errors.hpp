#pragma once

#include <stdexcept>
#include <string>

namespace bmo {

/// delta has no threshold z with mu({f > z}) = delta (f has a plateau).
class NonAdmissibleDelta : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine ran out of its evaluation or bracketing budget.
class QuadratureBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trace does not satisfy a checker's structural precondition.
class MalformedTrace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration (unknown key, type or range error).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bmo
