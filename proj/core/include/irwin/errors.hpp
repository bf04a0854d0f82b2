#pragma once

#include <stdexcept>
#include <string>

namespace irwin {

// Requested decimal precision could not be certified after exhausting the
// retry policy (or the caller demanded a level/term budget that cannot reach
// it). Carries the best certified bound for diagnostics.
class PrecisionNotAchieved : public std::runtime_error {
 public:
  explicit PrecisionNotAchieved(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration-backed operation would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace irwin
