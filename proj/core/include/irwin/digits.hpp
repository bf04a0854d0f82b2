#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "irwin/real.hpp"

namespace irwin {

using u64 = std::uint64_t;

// The (base, digit, occurrence-count) triple every computation here is about:
// denominators restricted to integers whose base-b expansion contains the
// digit d exactly k times.
struct ProblemSpec {
  unsigned b = 10;  // base, >= 2 (capped at 2^15 so b^4 fits in 64 bits)
  unsigned d = 9;   // digit, 0 <= d < b
  unsigned k = 0;   // occurrence count, >= 0

  // throws std::invalid_argument when outside the supported domain
  void validate() const;

  // the one empty case: base 2, digit 1, k = 0 (every positive integer
  // starts with a 1 in binary), whose sum is exactly zero
  bool degenerate_zero() const { return b == 2 && d == 1 && k == 0; }
};

// number of base-b digits of n; digit_length(0) = 0
int digit_length(u64 n, unsigned b);

// occurrences of the digit d in the base-b expansion of n; count_digit(0) = 0
unsigned count_digit(u64 n, unsigned b, unsigned d);

// the first l digits of n, i.e. n shifted right to length l;
// requires 1 <= l <= digit_length(n)
u64 leading_part(u64 n, unsigned b, int l);

// positive integers with exactly l digits and exactly i occurrences of d,
// ascending; empty when i > l (and when (b,d,l,i) = (2,1,1,0) style cases
// where the leading digit forces an occurrence)
std::vector<u64> level_integers(const ProblemSpec& spec, int l, unsigned i);

// number of digit strings of length l (leading zeros allowed) with exactly
// k occurrences of d: C(l,k) * (b-1)^(l-k); 1 for l = k = 0
mpz_class count_strings(unsigned b, unsigned l, unsigned k);

// sum of 1/n over level_integers(spec, l, spec.k) at the given precision,
// with the accumulated-rounding bound (terms) * (one ulp of the sum)
struct BlockSum {
  Real value;
  Real error_bound;
  u64 terms = 0;
};
BlockSum block_sum(const ProblemSpec& spec, int l, mpfr_prec_t prec);

// b^e as u64; validate() guarantees no overflow for e <= 4
u64 upow(unsigned b, int e);

}  // namespace irwin
