#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "irwin/digits.hpp"
#include "irwin/precision.hpp"
#include "irwin/real.hpp"

namespace irwin {

// Moment kinds: u holds integrals of x^m, v holds integrals of (1-x)^m
// against the same family of measures. Both obey a linear recurrence whose
// only division is by the exact integer b^(m+1) - b + 1.
enum class MomentKind { u, v };
enum class MomentMode { exact, guarded };

// sums[j] = sum of a^j over digits 0 <= a < b with a != excluded;
// sums[0] counts them, i.e. equals b-1.
struct PowerSums {
  unsigned b = 0;
  unsigned excluded = 0;
  std::vector<mpz_class> sums;
};
PowerSums power_sums(unsigned b, unsigned excluded, int max_j);

// Exact mode is refused above this many columns; the scaled integer entries
// grow quadratically in bit size and this is where usefulness ends.
inline constexpr int kExactModeCap = 400;

// Working precision used for a guarded table certifying `target_digits`
// decimal places over columns up to max_m.
mpfr_prec_t moment_working_prec(long target_digits, int max_m);

// Table of moments u_{j;m} (or v_{j;m}) for rows j = 0..spec.k and columns
// m = 0..max_m.
//
// Exact mode stores integer-scaled entries: scaled_num(j,m) is the entry
// times scale(m) = (prod_{i<=m} (b^(i+1)-b+1))^(k+1), an exact integer.
// The k+1 power is what the recurrence actually needs: each step down in
// row index can contribute one more factor of b^(m+1)-b+1 to the true
// denominator, and sharing one scale per column keeps every addition and
// same-column comparison a plain integer operation.
//
// Guarded mode stores entries normalized by 1/m! at a fixed working
// precision; every entry carries the certified absolute error bound
// entry_error(j,m) = 4*b*(j+1)*(m+3)^2 * 2^-W. The normalization keeps the
// recurrence coefficients independent of m (gamma_i/i! and d^i/i!), so the
// inner loop is plain fused multiply-adds over positive quantities and the
// error analysis is a relative-error induction through weighted averages.
class MomentTable {
 public:
  static MomentTable exact(MomentKind kind, const ProblemSpec& spec, int max_m);
  static MomentTable guarded(MomentKind kind, const ProblemSpec& spec, int max_m,
                             mpfr_prec_t prec);

  MomentKind kind() const { return kind_; }
  const ProblemSpec& spec() const { return spec_; }
  MomentMode mode() const { return mode_; }
  int max_m() const { return max_m_; }
  unsigned rows() const { return spec_.k + 1; }
  mpfr_prec_t working_prec() const { return prec_; }

  // entry value; guarded mode materializes normalized * m! (one rounding)
  Real at(unsigned j, int m) const;
  // exact mode only
  mpq_class exact_at(unsigned j, int m) const;
  const mpz_class& scaled_num(unsigned j, int m) const;
  const mpz_class& scale(int m) const;
  // guarded mode only
  const Real& normalized_at(unsigned j, int m) const;
  const Real& factorial(int m) const;
  Real entry_error(unsigned j, int m) const;

  // guarded mode: grow the table in place to a larger max_m
  void extend(int new_max_m);

  // fault injection for tests: overwrite one entry with an arbitrary value
  void corrupt(unsigned j, int m, const mpq_class& value);

 private:
  MomentTable() = default;
  void compute_guarded_columns(int from_m, int to_m);
  void compute_exact_columns(int from_m, int to_m);
  void prepare_guarded_coeffs(int to_m);
  void prepare_exact_coeffs(int to_m);

  MomentKind kind_ = MomentKind::u;
  MomentMode mode_ = MomentMode::guarded;
  ProblemSpec spec_;
  int max_m_ = 0;
  mpfr_prec_t prec_ = 0;
  unsigned rec_digit_ = 0;  // d for kind u, b-1-d for kind v

  // exact storage
  std::vector<std::vector<mpz_class>> num_;  // [j][m], entry * scale(m)
  std::vector<mpz_class> den_;               // scale(m)
  // guarded storage
  std::vector<std::vector<Real>> norm_;  // [j][m], entry / m!
  std::vector<Real> fact_;               // m!
  std::vector<Real> cgamma_;             // gamma_i / i!
  std::vector<Real> cdelta_;             // rec_digit^i / i!
  std::vector<Real> epow_;               // b^(m+1) / m!  (v row 0 source term)
  // shared
  std::vector<mpz_class> q_;  // b^(m+1) - b + 1
  std::vector<mpz_class> gamma_;
};

// Guarded tables at the precision implied by ctx.target_digits.
MomentTable compute_u(const ProblemSpec& spec, int max_m, const PrecisionContext& ctx);
MomentTable compute_v(const ProblemSpec& spec, int max_m, const PrecisionContext& ctx);
// Exact tables (throws std::invalid_argument above kExactModeCap).
MomentTable compute_u_exact(const ProblemSpec& spec, int max_m);
MomentTable compute_v_exact(const ProblemSpec& spec, int max_m);

// Verifies every structural bound on a table: positivity, the b/(m+1) and b
// envelopes, strict monotonicity in j and in m away from the known constant
// rows, and the row-0 two-sided estimate against (f/(b-1))^m.
//
// Exact tables decide every predicate outright. Guarded tables decide each
// predicate against the certified entry intervals, so a claim can come back
// proven, provably violated, or unresolved (intervals overlap); `ok` means
// no provable violation, `complete` means nothing was left unresolved.
// Callers wanting a definitive verdict escalate precision until complete.
struct BoundsReport {
  bool ok = true;
  bool complete = true;
  std::string first_violation;
  std::string first_unresolved;
  long checked = 0;
  long unresolved = 0;
};
BoundsReport check_bounds(const MomentTable& table);

}  // namespace irwin
