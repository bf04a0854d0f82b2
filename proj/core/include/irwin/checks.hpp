#pragma once

#include <functional>
#include <string>
#include <vector>

namespace irwin::checks {

// One named self-check: an analytically forced identity or inequality the
// library must reproduce, together with its wall-clock budget.
struct CheckResult {
  std::string name;
  bool pass = false;
  double elapsed_ms = 0;
  double limit_ms = 0;   // 0 = no budget enforced
  std::string detail;    // measurement summary, or the reason for failure
};

struct BatteryReport {
  std::vector<CheckResult> results;
  bool all_pass = true;
  double total_ms = 0;
};

// Invoked as each check finishes, in order; useful for live progress lines.
using Progress = std::function<void(const CheckResult&)>;

// The full property battery: exact degenerate and closed-form values,
// cross-variant/cross-level agreement, moment invariants over several bases,
// independent-enumeration moment and interval-mass comparisons, transform
// duality, monotonicity in the occurrence count, analytic lower bounds,
// the telescoping limit identity, and bit-level determinism.
BatteryReport acceptance_battery(const Progress& progress = {});

// Reduced battery over bases 2 and 10 with small sizes; finishes in a few
// seconds and is intended as a quick health check.
BatteryReport fast_battery(const Progress& progress = {});

// Deliberately corrupts one entry of a guarded moment table and returns the
// invariant name the bounds checker reports for it. An empty string means
// the corruption went undetected, i.e. the checker is broken.
std::string fault_injection_probe();

}  // namespace irwin::checks
