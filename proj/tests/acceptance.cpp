// Acceptance gate: runs the full criteria battery, one line per criterion.
// Each check recomputes its targets from scratch and certifies every
// comparison against rigorous error bounds; the time limits printed are the
// contractual budgets enforced by the battery itself.
#include <cstdio>

#include "irwin/checks.hpp"

int main() {
  int index = 0;
  const auto print = [&index](const irwin::checks::CheckResult& r) {
    std::printf("[%s] %2d %-26s %9.1f ms (limit %6.0f ms)  %s\n",
                r.pass ? "PASS" : "FAIL", ++index, r.name.c_str(),
                r.elapsed_ms, r.limit_ms, r.detail.c_str());
    std::fflush(stdout);
  };
  const irwin::checks::BatteryReport rep =
      irwin::checks::acceptance_battery(print);
  int passed = 0;
  for (const auto& r : rep.results) passed += r.pass;
  std::printf("%d/%zu criteria passed in %.1f s\n", passed,
              rep.results.size(), rep.total_ms / 1000.0);
  return rep.all_pass ? 0 : 1;
}
