#pragma once

#include <stdexcept>
#include <string>

namespace walrus {

// Contract violation by the caller (bad bundle, bad index, bad state).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// An enumeration limit would be exceeded; never silently sampled instead.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data fails a structural invariant (incomplete table, bad JSON, ...).
struct MalformedError : std::runtime_error {
  explicit MalformedError(const std::string& msg) : std::runtime_error(msg) {}
};

// Floating-point trouble inside an inner loop; callers retry in high precision.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace walrus
