#include "irwin/digits.hpp"

#include <stdexcept>
#include <string>

namespace irwin {

void ProblemSpec::validate() const {
  if (b < 2) throw std::invalid_argument("base must be at least 2");
  if (b > (1u << 15))
    throw std::invalid_argument("base too large (at most 32768)");
  if (d >= b) throw std::invalid_argument("digit must be below the base");
}

int digit_length(u64 n, unsigned b) {
  int l = 0;
  while (n > 0) {
    n /= b;
    ++l;
  }
  return l;
}

unsigned count_digit(u64 n, unsigned b, unsigned d) {
  unsigned c = 0;
  while (n > 0) {
    if (n % b == d) ++c;
    n /= b;
  }
  return c;
}

u64 leading_part(u64 n, unsigned b, int l) {
  int len = digit_length(n, b);
  if (l < 1 || l > len)
    throw std::invalid_argument("leading_part: need 1 <= l <= digit_length(n)");
  for (int i = 0; i < len - l; ++i) n /= b;
  return n;
}

u64 upow(unsigned b, int e) {
  u64 r = 1;
  for (int i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(r, static_cast<u64>(b), &r))
      throw std::overflow_error("upow: power exceeds 64 bits");
  }
  return r;
}

std::vector<u64> level_integers(const ProblemSpec& spec, int l, unsigned i) {
  spec.validate();
  if (l < 1) throw std::invalid_argument("level_integers: l must be positive");
  if (l > 6) throw std::invalid_argument("level_integers: l above enumeration range");
  std::vector<u64> out;
  if (i > static_cast<unsigned>(l)) return out;
  u64 lo = upow(spec.b, l - 1);
  u64 hi = upow(spec.b, l);
  for (u64 n = lo; n < hi; ++n)
    if (count_digit(n, spec.b, spec.d) == i) out.push_back(n);
  return out;
}

mpz_class count_strings(unsigned b, unsigned l, unsigned k) {
  if (k > l) return 0;
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), l, k);
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), b - 1, l - k);
  return c * p;
}

BlockSum block_sum(const ProblemSpec& spec, int l, mpfr_prec_t prec) {
  spec.validate();
  if (l < 1) throw std::invalid_argument("block_sum: l must be positive");
  if (l > 6) throw std::invalid_argument("block_sum: l above enumeration range");
  BlockSum out;
  out.value = Real(prec);
  Real term(prec);
  u64 lo = upow(spec.b, l - 1);
  u64 hi = upow(spec.b, l);
  for (u64 n = lo; n < hi; ++n) {
    if (count_digit(n, spec.b, spec.d) != spec.k) continue;
    mpfr_set_ui(term.raw(), n, MPFR_RNDN);
    mpfr_ui_div(term.raw(), 1, term.raw(), MPFR_RNDN);
    out.value.add(term);
    ++out.terms;
  }
  if (out.terms == 0 || out.value.is_zero()) {
    out.error_bound = Real(kBoundPrec);
  } else {
    // terms divisions + (terms-1) additions; every summand is a term of the
    // positive sum, so each rounding is at most half an ulp at the final
    // sum's scale.  The +1 doubles the bound to absorb intermediate partial
    // sums that land in the binade above the final value.
    out.error_bound =
        up_mul_ui(up_pow2(mpfr_get_exp(out.value.raw()) + 1 - prec), out.terms);
  }
  return out;
}

}  // namespace irwin
