#pragma once

#include <stdexcept>
#include <string>

namespace didacks {

// Bad input: violated type invariants, malformed bases, schema problems.
class validation_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// The requested inner product does not converge for this norm/kernel/dimension.
class divergence_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Factorization failed even after the ridge fallback.
class solver_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) {
    throw validation_error(message);
  }
}

} // namespace detail
} // namespace didacks
