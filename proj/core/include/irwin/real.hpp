#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace irwin {

// Thin RAII wrapper over mpfr_t.
//
// Precision is fixed at construction (bits of mantissa). In-place arithmetic
// rounds into the receiver's precision with round-to-nearest; that is the
// style used throughout the hot loops so every rounding site is explicit.
// The few convenience operators allocate at the wider operand's precision.
class Real {
 public:
  Real() { mpfr_init2(v_, 64); mpfr_set_zero(v_, 1); }
  explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, 64);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);  // keeps receiver precision
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  static Real of_ui(unsigned long x, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_ui(r.v_, x, MPFR_RNDN);
    return r;
  }
  static Real of_z(const mpz_class& z, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_z(r.v_, z.get_mpz_t(), MPFR_RNDN);
    return r;
  }
  static Real of_q(const mpq_class& q, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_q(r.v_, q.get_mpq_t(), MPFR_RNDN);
    return r;
  }
  static Real of_d(double x, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
  }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

  void set_zero() { mpfr_set_zero(v_, 1); }
  void set(const Real& o) { mpfr_set(v_, o.v_, MPFR_RNDN); }
  void set_ui(unsigned long x) { mpfr_set_ui(v_, x, MPFR_RNDN); }
  void set_z(const mpz_class& z) { mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN); }
  void set_q(const mpq_class& q) { mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }

  // In-place arithmetic, one rounding each, receiver precision.
  void add(const Real& a) { mpfr_add(v_, v_, a.v_, MPFR_RNDN); }
  void sub(const Real& a) { mpfr_sub(v_, v_, a.v_, MPFR_RNDN); }
  void mul(const Real& a) { mpfr_mul(v_, v_, a.v_, MPFR_RNDN); }
  void div(const Real& a) { mpfr_div(v_, v_, a.v_, MPFR_RNDN); }
  void add_ui(unsigned long a) { mpfr_add_ui(v_, v_, a, MPFR_RNDN); }
  void mul_ui(unsigned long a) { mpfr_mul_ui(v_, v_, a, MPFR_RNDN); }
  void div_ui(unsigned long a) { mpfr_div_ui(v_, v_, a, MPFR_RNDN); }
  void mul_z(const mpz_class& a) { mpfr_mul_z(v_, v_, a.get_mpz_t(), MPFR_RNDN); }
  void div_z(const mpz_class& a) { mpfr_div_z(v_, v_, a.get_mpz_t(), MPFR_RNDN); }
  void neg() { mpfr_neg(v_, v_, MPFR_RNDN); }
  // this += a*b with a single rounding
  void addmul(const Real& a, const Real& b) { mpfr_fma(v_, a.v_, b.v_, v_, MPFR_RNDN); }

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_); }
  int cmp(const Real& o) const { return mpfr_cmp(v_, o.v_); }
  int cmp_ui(unsigned long x) const { return mpfr_cmp_ui(v_, x); }
  int cmp_d(double x) const { return mpfr_cmp_d(v_, x); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // Diagnostic scientific form, shortest-ish; not the fixed-point output format.
  std::string str(int digits = 17) const;

 private:
  mpfr_t v_;
};

inline bool operator<(const Real& a, const Real& b) { return a.cmp(b) < 0; }
inline bool operator<=(const Real& a, const Real& b) { return a.cmp(b) <= 0; }
inline bool operator>(const Real& a, const Real& b) { return a.cmp(b) > 0; }
inline bool operator>=(const Real& a, const Real& b) { return a.cmp(b) >= 0; }

inline Real operator+(const Real& a, const Real& b) {
  Real r(std::max(a.prec(), b.prec()));
  mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real operator-(const Real& a, const Real& b) {
  Real r(std::max(a.prec(), b.prec()));
  mpfr_sub(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real operator*(const Real& a, const Real& b) {
  Real r(std::max(a.prec(), b.prec()));
  mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real operator/(const Real& a, const Real& b) {
  Real r(std::max(a.prec(), b.prec()));
  mpfr_div(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real abs(const Real& a) {
  Real r(a.prec());
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

// ---- upward-rounded bound arithmetic ------------------------------------
//
// Error bounds are tracked in a fixed low precision with all roundings
// upward, so a bound can only ever be over-reported. MPFR exponents cover
// absurdly small magnitudes, so there is no underflow at high target
// precision (a plain double would flush 1e-400 to zero).

inline constexpr mpfr_prec_t kBoundPrec = 64;

inline Real up_ui(unsigned long x) { return Real::of_ui(x, kBoundPrec); }
inline Real up_d(double x) {
  Real r(kBoundPrec);
  mpfr_set_d(r.raw(), x, MPFR_RNDU);
  return r;
}
inline Real up_add(const Real& a, const Real& b) {
  Real r(kBoundPrec);
  mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
  return r;
}
inline Real up_mul(const Real& a, const Real& b) {
  Real r(kBoundPrec);
  mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
  return r;
}
inline Real up_mul_ui(const Real& a, unsigned long x) {
  Real r(kBoundPrec);
  mpfr_mul_ui(r.raw(), a.raw(), x, MPFR_RNDU);
  return r;
}
inline Real up_div_ui(const Real& a, unsigned long x) {
  Real r(kBoundPrec);
  mpfr_div_ui(r.raw(), a.raw(), x, MPFR_RNDU);
  return r;
}
// b^e rounded up, e may be negative
Real up_pow_si(unsigned long base, long e);
// 2^e as an exact bound atom
inline Real up_pow2(long e) {
  Real r(kBoundPrec);
  mpfr_set_ui_2exp(r.raw(), 1, e, MPFR_RNDU);
  return r;
}
// |x| rounded up into bound precision
inline Real up_abs(const Real& a) {
  Real r(kBoundPrec);
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDU);
  return r;
}

// ---- decimal fixed-point output -----------------------------------------

// x printed with exactly frac_digits digits after the point, ties to even.
std::string to_fixed(const Real& x, long frac_digits);

// True when x sits within err of a rounding boundary for frac_digits places,
// i.e. the printed string could change under a perturbation of size err.
bool rounding_ambiguous(const Real& x, const Real& err, long frac_digits);

// Short upward-rounded scientific form for an error bound, e.g. "3.2e-102".
std::string bound_str(const Real& err);

// log(q) to prec bits, error below 4 ulps (computed with 32 guard bits).
Real log_of_q(const mpq_class& q, mpfr_prec_t prec);

}  // namespace irwin
