#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "irwin/digits.hpp"

using namespace irwin;

namespace {

// string-based reference for the digit routines
std::string digit_string(u64 n, unsigned b) {
  std::string s;
  while (n) {
    s.insert(s.begin(), static_cast<char>('0' + n % b));
    n /= b;
  }
  return s;
}

unsigned ref_count(u64 n, unsigned b, unsigned d) {
  unsigned c = 0;
  for (char ch : digit_string(n, b))
    if (static_cast<unsigned>(ch - '0') == d) ++c;
  return c;
}

}  // namespace

TEST_CASE("digit counting matches a string-based reference") {
  for (unsigned b : {2u, 3u, 10u, 16u}) {
    for (u64 n = 0; n < 2000; ++n) {
      CHECK(digit_length(n, b) ==
            static_cast<int>(digit_string(n, b).size()));
      for (unsigned d = 0; d < b; ++d)
        CHECK(count_digit(n, b, d) == ref_count(n, b, d));
    }
  }
  CHECK(count_digit(999, 10, 9) == 3);
  CHECK(count_digit(0x1F, 16, 15) == 1);
  CHECK(digit_length(0, 7) == 0);
}

TEST_CASE("leading_part truncates the expansion from the left") {
  for (unsigned b : {2u, 10u}) {
    for (u64 n = 1; n < 3000; n += 7) {
      const std::string s = digit_string(n, b);
      for (int l = 1; l <= static_cast<int>(s.size()); ++l) {
        u64 expect = 0;
        for (int i = 0; i < l; ++i) expect = expect * b + (s[i] - '0');
        CHECK(leading_part(n, b, l) == expect);
      }
      CHECK(leading_part(n, b, digit_length(n, b)) == n);
    }
  }
}

TEST_CASE("spec validation accepts the domain and rejects the rest") {
  CHECK_NOTHROW((ProblemSpec{2, 0, 0}).validate());
  CHECK_NOTHROW((ProblemSpec{2, 1, 5}).validate());
  CHECK_NOTHROW((ProblemSpec{32768, 31, 2}).validate());
  CHECK_THROWS_AS((ProblemSpec{1, 0, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ProblemSpec{0, 0, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ProblemSpec{10, 10, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ProblemSpec{10, 11, 1}).validate(), std::invalid_argument);
  CHECK((ProblemSpec{2, 1, 0}).degenerate_zero());
  CHECK_FALSE((ProblemSpec{2, 1, 1}).degenerate_zero());
  CHECK_FALSE((ProblemSpec{2, 0, 0}).degenerate_zero());
  CHECK_FALSE((ProblemSpec{3, 1, 0}).degenerate_zero());
}

TEST_CASE("count_strings partitions all strings of a length") {
  for (unsigned b : {2u, 3u, 10u}) {
    for (unsigned l = 0; l <= 12; ++l) {
      mpz_class total = 0;
      for (unsigned k = 0; k <= l; ++k) total += count_strings(b, l, k);
      mpz_class bl;
      mpz_ui_pow_ui(bl.get_mpz_t(), b, l);
      CHECK(total == bl);
      CHECK(count_strings(b, l, l + 1) == 0);
    }
  }
  // binary: one digit is "the" digit, so the count is a plain binomial
  for (unsigned l = 0; l <= 10; ++l)
    for (unsigned k = 0; k <= l; ++k) {
      mpz_class c;
      mpz_bin_uiui(c.get_mpz_t(), l, k);
      CHECK(count_strings(2, l, k) == c);
    }
}

TEST_CASE("level_integers enumerates exactly the right integers") {
  for (unsigned b : {2u, 3u, 10u}) {
    for (unsigned d : {0u, b - 1}) {
      ProblemSpec spec{b, d, 1};
      for (int l = 1; l <= 3; ++l) {
        for (unsigned i = 0; i <= static_cast<unsigned>(l); ++i) {
          const auto got = level_integers(spec, l, i);
          std::vector<u64> expect;
          for (u64 n = upow(b, l - 1); n < upow(b, l); ++n)
            if (count_digit(n, b, d) == i) expect.push_back(n);
          CHECK(got == expect);
        }
      }
    }
  }
  // binary, digit 1, zero occurrences: impossible for any positive integer
  CHECK(level_integers(ProblemSpec{2, 1, 0}, 1, 0).empty());
  CHECK(level_integers(ProblemSpec{2, 1, 0}, 3, 0).empty());
}

TEST_CASE("block_sum equals the rational partial sum within its bound") {
  for (unsigned b : {2u, 10u}) {
    ProblemSpec spec{b, b - 1, 1};
    for (int l = 1; l <= 3; ++l) {
      const auto bs = block_sum(spec, l, 128);
      const auto nums = level_integers(spec, l, spec.k);
      CHECK(bs.terms == nums.size());
      mpq_class exact = 0;
      for (u64 n : nums) exact += mpq_class(1, static_cast<unsigned long>(n));
      Real ref(256);
      mpfr_set_q(ref.raw(), exact.get_mpq_t(), MPFR_RNDN);
      Real diff(256);
      mpfr_sub(diff.raw(), bs.value.raw(), ref.raw(), MPFR_RNDN);
      mpfr_abs(diff.raw(), diff.raw(), MPFR_RNDN);
      CHECK(mpfr_cmp(diff.raw(), bs.error_bound.raw()) <= 0);
    }
  }
}

TEST_CASE("upow small powers") {
  CHECK(upow(10, 0) == 1);
  CHECK(upow(10, 4) == 10000);
  CHECK(upow(2, 4) == 16);
  CHECK(upow(32768, 4) == 1152921504606846976ULL);
}
