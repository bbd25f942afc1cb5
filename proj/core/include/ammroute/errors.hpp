#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ammroute {

// Input outside the domain of a trade function (negative, non-finite, or at
// or below the extended-domain pole).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested output exceeds what the pool can ever release.
class ReserveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A quote or price came back NaN/inf inside a solver loop.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Allocation violates the box constraints; one entry per violated pool.
class FeasibilityError : public std::runtime_error {
 public:
  explicit FeasibilityError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "infeasible allocation";
    for (const auto& v : items) out += "; " + v;
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace ammroute
