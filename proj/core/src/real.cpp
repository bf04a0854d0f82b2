#include "irwin/real.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace irwin {

std::string Real::str(int digits) const {
  char fmt[32];
  std::snprintf(fmt, sizeof(fmt), "%%.%dRg", digits);
  char* out = nullptr;
  mpfr_asprintf(&out, fmt, v_);
  std::string s(out);
  mpfr_free_str(out);
  return s;
}

Real up_pow_si(unsigned long base, long e) {
  Real r(kBoundPrec);
  mpfr_set_ui(r.raw(), base, MPFR_RNDU);
  mpfr_pow_si(r.raw(), r.raw(), e, MPFR_RNDU);
  return r;
}

namespace {

// x * 10^frac_digits rounded to an integer, ties to even (MPFR_RNDN on
// mpfr_get_z is round-to-nearest-even). Work at enough precision that the
// scaling multiply cannot disturb the tie decision beyond x's own accuracy.
mpz_class scale_to_int(const Real& x, long frac_digits) {
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(frac_digits));
  mpfr_prec_t wp = x.prec() + static_cast<mpfr_prec_t>(frac_digits * 3.33) + 64;
  mpfr_t s;
  mpfr_init2(s, wp);
  mpfr_mul_z(s, x.raw(), pow10.get_mpz_t(), MPFR_RNDN);
  mpz_class n;
  mpfr_get_z(n.get_mpz_t(), s, MPFR_RNDN);
  mpfr_clear(s);
  return n;
}

}  // namespace

std::string to_fixed(const Real& x, long frac_digits) {
  if (frac_digits < 0) frac_digits = 0;
  mpz_class n = scale_to_int(x, frac_digits);
  bool negative = n < 0;
  if (negative) n = -n;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(frac_digits));
  mpz_class ip = n / pow10;
  mpz_class fp = n % pow10;
  std::string out = negative ? "-" : "";
  out += ip.get_str();
  if (frac_digits > 0) {
    std::string f = fp.get_str();
    out += ".";
    out.append(static_cast<size_t>(frac_digits) - f.size(), '0');
    out += f;
  }
  return out;
}

bool rounding_ambiguous(const Real& x, const Real& err, long frac_digits) {
  if (err.sign() <= 0) return false;
  // Distance from x*10^P to the nearest half-integer, versus err*10^P.
  mpfr_prec_t wp = x.prec() + static_cast<mpfr_prec_t>(frac_digits * 3.33) + 64;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(frac_digits));
  mpfr_t s, half, d;
  mpfr_init2(s, wp);
  mpfr_init2(half, wp);
  mpfr_init2(d, wp);
  mpfr_mul_z(s, x.raw(), pow10.get_mpz_t(), MPFR_RNDN);
  // half = s - floor(s) - 1/2, in [-1/2, 1/2); boundary distance is |half|
  mpfr_floor(d, s);
  mpfr_sub(half, s, d, MPFR_RNDN);
  mpfr_sub_d(half, half, 0.5, MPFR_RNDN);
  mpfr_abs(half, half, MPFR_RNDN);
  Real scaled_err = up_mul(up_abs(err), Real::of_z(pow10, kBoundPrec));
  // Be conservative: also cover the slack of the scaling multiply itself.
  Real slack = up_mul(up_abs(Real::of_d(mpfr_get_d(s, MPFR_RNDZ), kBoundPrec)), up_pow2(-(x.prec() - 4)));
  bool ambiguous = mpfr_cmp(half, up_add(scaled_err, slack).raw()) <= 0;
  mpfr_clear(s);
  mpfr_clear(half);
  mpfr_clear(d);
  return ambiguous;
}

std::string bound_str(const Real& err) {
  if (err.sign() <= 0) return "0";
  // ceiling to two significant decimal digits: m * 10^e with 10 <= m <= 99
  long e10 = static_cast<long>(
      std::floor(static_cast<double>(mpfr_get_exp(err.raw())) * 0.30102999566398119) - 2);
  Real scaled(kBoundPrec);
  mpfr_t p;
  mpfr_init2(p, 128);
  mpfr_ui_pow_ui(p, 10, static_cast<unsigned long>(e10 < 0 ? -e10 : e10), MPFR_RNDD);
  if (e10 < 0)
    mpfr_mul(scaled.raw(), err.raw(), p, MPFR_RNDU);
  else
    mpfr_div(scaled.raw(), err.raw(), p, MPFR_RNDU);
  mpfr_clear(p);
  long m = mpfr_get_si(scaled.raw(), MPFR_RNDU);
  while (m > 99) {
    m = m / 10 + (m % 10 ? 1 : 0);
    ++e10;
  }
  while (m < 10) {
    m *= 10;
    --e10;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%ld.%lde%ld", m / 10, m % 10, e10 + 1);
  return buf;
}

Real log_of_q(const mpq_class& q, mpfr_prec_t prec) {
  Real x(prec + 32);
  mpfr_set_q(x.raw(), q.get_mpq_t(), MPFR_RNDN);
  mpfr_log(x.raw(), x.raw(), MPFR_RNDN);
  Real r(prec);
  mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

}  // namespace irwin
