#pragma once

namespace irwin {

// How much decimal precision a computation must certify, and how it is
// allowed to spend extra effort doing so. Rounding of printed decimals is
// always half-even.
struct PrecisionContext {
  long target_digits = 50;  // P: places after the decimal point to certify
  long guard_digits = 15;   // extra decimal places carried internally
  int max_retries = 3;      // guard-doubling attempts on ambiguous rounding
};

}  // namespace irwin
