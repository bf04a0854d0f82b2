#pragma once

#include <string>
#include <vector>

#include "irwin/digits.hpp"
#include "irwin/precision.hpp"
#include "irwin/real.hpp"

namespace irwin {

// Which of the two geometrically convergent expansions to evaluate.
//  - alternating: coefficient masses u_{j;m} against powers 1/n^(m+1),
//    summed with sign (-1)^m.  Term magnitudes decrease monotonically,
//    so the tail after a computed term is bounded by that term.
//  - positive: coefficient masses v_{j;m} against powers 1/(n+1)^(m+1),
//    all terms positive.  The tail is bounded geometrically via the
//    uniform cap v <= b.
enum class Variant { alternating, positive };

struct SeriesConfig {
  // Expansion level l: series terms run over the integers with exactly l
  // base-b digits, and the plain harmonic prefix covers lengths < l.
  // 0 selects automatically (see choose_level); explicit values 1..4.
  int level = 0;
  Variant variant = Variant::alternating;
  // Sum the contributions for all counts 0..k instead of exactly k.
  bool at_most = false;
  // Hard cap on the number of series terms; 0 = max(2000, 30*digits).
  long max_terms = 0;
};

struct SeriesResult {
  Real value;
  // Certified absolute error bound on `value` (rounding + truncation).
  Real error_bound;
  // error_bound < 10^-digits held at return.
  bool achieved = false;
  // The requested sum is empty (base 2, digit 1, count 0): value is an
  // exact 0 and no series machinery ran.
  bool degenerate_zero = false;
  int level = 0;
  Variant variant = Variant::alternating;
  // Number of series terms actually summed.
  long terms = 0;
  double elapsed_ms = 0.0;
};

// Automatic expansion level: 2 by default, deeper when many digits are
// requested and the level is still cheap to enumerate, 1 when even the
// two-digit block of base b is too large to enumerate.
int choose_level(const ProblemSpec& spec, long digits);

// Upper bound (rounded upward) on the magnitude of the alternating series
// term with index m+1 at level >= 2: b^(-m(l-1)+3-l) / (m+2).  Consecutive
// bounds shrink by at least b^(l-1) >= 2, so the full remainder after
// summing term indices 0..m is at most 2*truncation_bound(b, level, m).
Real truncation_bound(unsigned b, int level, long m);

// Sum of 1/n over positive integers whose base-b expansion contains digit d
// exactly k times (or at most k times with cfg.at_most), with a certified
// error bound targeting `digits` correct decimal places.
SeriesResult irwin_sum(const ProblemSpec& spec, long digits,
                       const SeriesConfig& cfg = {});

// All counts 0..spec.k in one pass, sharing the coefficient table and the
// per-integer power streams across targets.  Result i is the sum for
// exactly-i occurrences, each with its own certified bound.
std::vector<SeriesResult> irwin_sum_per_count(const ProblemSpec& spec,
                                              long digits,
                                              const SeriesConfig& cfg = {});

// Sum of 1/q over the integers q whose leading base-b digits are exactly n
// and whose expansion contains d exactly k times.  Requires that n itself
// contains d at most k times.  Single-point version of the series above.
SeriesResult prefix_tail(const ProblemSpec& spec, u64 n, long digits,
                         Variant variant = Variant::alternating);

// b * ln b, the common limit of the exactly-k sums as k grows.
Real limit_value(unsigned b, mpfr_prec_t prec);

// b * ln(1 + 1/n), the limit of prefix_tail(spec, n, .) as k grows.
Real limit_prefix_value(unsigned b, u64 n, mpfr_prec_t prec);

struct DecimalResult {
  // Fixed-point decimal with exactly `digits` fractional digits, rounded
  // half-even.  Trustworthy to detail.error_bound even when the precision
  // target was not met.
  std::string text;
  SeriesResult detail;
};

// Evaluate and format, retrying with a widened internal target when the
// bound misses or the decimal rounding is ambiguous at the boundary.
DecimalResult evaluate_decimal(const ProblemSpec& spec, long digits,
                               const SeriesConfig& cfg = {},
                               const PrecisionContext& ctx = {});

}  // namespace irwin
