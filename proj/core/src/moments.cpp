#include "irwin/moments.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace irwin {

PowerSums power_sums(unsigned b, unsigned excluded, int max_j) {
  PowerSums ps;
  ps.b = b;
  ps.excluded = excluded;
  ps.sums.assign(static_cast<size_t>(max_j) + 1, mpz_class(0));
  mpz_class p;
  for (unsigned a = 0; a < b; ++a) {
    if (a == excluded) continue;
    p = 1;
    for (int j = 0; j <= max_j; ++j) {
      ps.sums[j] += p;
      if (j < max_j) p *= a;
    }
  }
  return ps;
}

mpfr_prec_t moment_working_prec(long target_digits, int max_m) {
  // bits for the decimal target, plus headroom for the (m+3)^2-shaped error
  // growth of the recurrence and a fixed cushion
  double bits = static_cast<double>(target_digits) * 3.3219280948873626;
  double mlog = 2.0 * std::log2(static_cast<double>(max_m) + 3.0);
  return static_cast<mpfr_prec_t>(bits + mlog) + 80;
}

static unsigned recurrence_digit(MomentKind kind, const ProblemSpec& spec) {
  return kind == MomentKind::u ? spec.d : spec.b - 1 - spec.d;
}

void MomentTable::prepare_guarded_coeffs(int to_m) {
  const unsigned b = spec_.b;
  if (static_cast<int>(gamma_.size()) <= to_m) {
    gamma_ = power_sums(b, rec_digit_, to_m).sums;
  }
  mpz_class q, fac, dpow, bpow;
  for (int m = static_cast<int>(q_.size()); m <= to_m; ++m) {
    mpz_ui_pow_ui(q.get_mpz_t(), b, static_cast<unsigned long>(m) + 1);
    q_.push_back(q - b + 1);
  }
  for (int i = static_cast<int>(fact_.size()); i <= to_m; ++i) {
    mpz_fac_ui(fac.get_mpz_t(), static_cast<unsigned long>(i));
    // GMP defines 0^0 = 1, which is exactly the convention the recurrence uses
    mpz_ui_pow_ui(dpow.get_mpz_t(), rec_digit_, static_cast<unsigned long>(i));
    cgamma_.push_back(Real::of_q(mpq_class(gamma_[i], fac), prec_));
    cdelta_.push_back(Real::of_q(mpq_class(dpow, fac), prec_));
    if (kind_ == MomentKind::v) {
      mpz_ui_pow_ui(bpow.get_mpz_t(), b, static_cast<unsigned long>(i) + 1);
      epow_.push_back(Real::of_q(mpq_class(bpow, fac), prec_));
    }
    fact_.push_back(Real::of_z(fac, prec_));
  }
}

void MomentTable::compute_guarded_columns(int from_m, int to_m) {
  const unsigned rows = spec_.k + 1;
  Real acc(prec_);
  for (unsigned j = 0; j < rows; ++j) {
    norm_[j].resize(static_cast<size_t>(to_m) + 1, Real(prec_));
  }
  for (int m = from_m; m <= to_m; ++m) {
    for (unsigned j = 0; j < rows; ++j) {
      if (m == 0) {
        norm_[j][0] = Real::of_ui(spec_.b, prec_);
        continue;
      }
      acc.set_zero();
      for (int i = 1; i <= m; ++i) {
        acc.addmul(cgamma_[i], norm_[j][m - i]);
      }
      if (j >= 1) {
        for (int i = 0; i <= m; ++i) {
          acc.addmul(cdelta_[i], norm_[j - 1][m - i]);
        }
      } else if (kind_ == MomentKind::v) {
        acc.add(epow_[m]);
      }
      acc.div_z(q_[m]);
      norm_[j][m] = acc;
    }
  }
}

void MomentTable::prepare_exact_coeffs(int to_m) {
  if (static_cast<int>(gamma_.size()) <= to_m) {
    gamma_ = power_sums(spec_.b, rec_digit_, to_m).sums;
  }
  mpz_class q, qpow;
  for (int m = static_cast<int>(q_.size()); m <= to_m; ++m) {
    mpz_ui_pow_ui(q.get_mpz_t(), spec_.b, static_cast<unsigned long>(m) + 1);
    q_.push_back(q - spec_.b + 1);
    mpz_class d = den_.empty() ? mpz_class(1) : den_.back();
    if (m >= 1) {
      mpz_pow_ui(qpow.get_mpz_t(), q_[m].get_mpz_t(), spec_.k + 1);
      d *= qpow;
    }
    den_.push_back(d);
  }
}

void MomentTable::compute_exact_columns(int from_m, int to_m) {
  const unsigned rows = spec_.k + 1;
  const unsigned b = spec_.b;
  for (unsigned j = 0; j < rows; ++j) {
    num_[j].resize(static_cast<size_t>(to_m) + 1, mpz_class(0));
  }
  mpz_class ratio, qpow, binom, dpow, t, q, r, bpow;
  for (int m = from_m; m <= to_m; ++m) {
    if (m == 0) {
      for (unsigned j = 0; j < rows; ++j) num_[j][0] = b;
      continue;
    }
    // coef_a[i] = C(m,i) * gamma_i * den_m/den_{m-i}; coef_b[i] the same with
    // the recurrence digit's i-th power. Shared by every row of this column.
    std::vector<mpz_class> coef_a(static_cast<size_t>(m) + 1);
    std::vector<mpz_class> coef_b(static_cast<size_t>(m) + 1);
    ratio = 1;
    for (int i = 1; i <= m; ++i) {
      mpz_pow_ui(qpow.get_mpz_t(), q_[m - i + 1].get_mpz_t(), spec_.k + 1);
      ratio *= qpow;  // now den_m/den_{m-i}
      mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(m),
                   static_cast<unsigned long>(i));
      coef_a[i] = binom * gamma_[i] * ratio;
      if (rows > 1) {
        mpz_ui_pow_ui(dpow.get_mpz_t(), rec_digit_, static_cast<unsigned long>(i));
        coef_b[i] = binom * dpow * ratio;
      }
    }
    for (unsigned j = 0; j < rows; ++j) {
      t = 0;
      for (int i = 1; i <= m; ++i) {
        mpz_addmul(t.get_mpz_t(), coef_a[i].get_mpz_t(),
                   num_[j][m - i].get_mpz_t());
      }
      if (j >= 1) {
        t += num_[j - 1][m];  // the i = 0 contribution, already on scale den_m
        for (int i = 1; i <= m; ++i) {
          mpz_addmul(t.get_mpz_t(), coef_b[i].get_mpz_t(),
                     num_[j - 1][m - i].get_mpz_t());
        }
      } else if (kind_ == MomentKind::v) {
        mpz_ui_pow_ui(bpow.get_mpz_t(), b, static_cast<unsigned long>(m) + 1);
        mpz_addmul(t.get_mpz_t(), bpow.get_mpz_t(), den_[m].get_mpz_t());
      }
      mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), t.get_mpz_t(), q_[m].get_mpz_t());
      if (r != 0) {
        throw std::logic_error("moment recurrence lost exact divisibility");
      }
      num_[j][m] = q;
    }
  }
}

MomentTable MomentTable::exact(MomentKind kind, const ProblemSpec& spec, int max_m) {
  spec.validate();
  if (max_m < 0 || max_m > kExactModeCap) {
    throw std::invalid_argument("exact moment table column count out of range");
  }
  MomentTable t;
  t.kind_ = kind;
  t.mode_ = MomentMode::exact;
  t.spec_ = spec;
  t.max_m_ = max_m;
  t.rec_digit_ = recurrence_digit(kind, spec);
  t.num_.resize(spec.k + 1);
  t.prepare_exact_coeffs(max_m);
  t.compute_exact_columns(0, max_m);
  return t;
}

MomentTable MomentTable::guarded(MomentKind kind, const ProblemSpec& spec, int max_m,
                                 mpfr_prec_t prec) {
  spec.validate();
  if (max_m < 0) throw std::invalid_argument("negative moment table size");
  MomentTable t;
  t.kind_ = kind;
  t.mode_ = MomentMode::guarded;
  t.spec_ = spec;
  t.max_m_ = max_m;
  t.prec_ = prec;
  t.rec_digit_ = recurrence_digit(kind, spec);
  t.norm_.resize(spec.k + 1);
  t.prepare_guarded_coeffs(max_m);
  t.compute_guarded_columns(0, max_m);
  return t;
}

void MomentTable::extend(int new_max_m) {
  if (mode_ != MomentMode::guarded) {
    throw std::logic_error("only guarded tables grow in place");
  }
  if (new_max_m <= max_m_) return;
  prepare_guarded_coeffs(new_max_m);
  compute_guarded_columns(max_m_ + 1, new_max_m);
  max_m_ = new_max_m;
}

Real MomentTable::at(unsigned j, int m) const {
  if (mode_ == MomentMode::exact) {
    return Real::of_q(exact_at(j, m), 256);
  }
  Real r = norm_[j][m];
  r.mul(fact_[m]);
  return r;
}

mpq_class MomentTable::exact_at(unsigned j, int m) const {
  if (mode_ != MomentMode::exact) {
    throw std::logic_error("exact entries only exist in exact mode");
  }
  mpq_class q(num_[j][m], den_[m]);
  q.canonicalize();
  return q;
}

const mpz_class& MomentTable::scaled_num(unsigned j, int m) const {
  return num_[j][m];
}

const mpz_class& MomentTable::scale(int m) const { return den_[m]; }

const Real& MomentTable::normalized_at(unsigned j, int m) const {
  return norm_[j][m];
}

const Real& MomentTable::factorial(int m) const { return fact_[m]; }

Real MomentTable::entry_error(unsigned j, int m) const {
  if (mode_ == MomentMode::exact) return Real(kBoundPrec);  // zero
  // absolute bound on |at(j,m) - true value|: the relative error of the
  // positive recurrence grows like (j+1)*(m+3)^2 rounding units, and the
  // entries themselves never exceed b
  Real e = up_ui(static_cast<unsigned long>(m) + 3);
  e = up_mul(e, e);
  e = up_mul_ui(e, 4UL * spec_.b * (j + 1));
  return up_mul(e, up_pow2(-static_cast<long>(prec_)));
}

void MomentTable::corrupt(unsigned j, int m, const mpq_class& value) {
  if (mode_ == MomentMode::exact) {
    mpz_class n = value.get_num() * den_[m];
    num_[j][m] = n / value.get_den();
  } else {
    Real r = Real::of_q(value, prec_);
    r.div(fact_[m]);
    norm_[j][m] = r;
  }
}

MomentTable compute_u(const ProblemSpec& spec, int max_m, const PrecisionContext& ctx) {
  return MomentTable::guarded(
      MomentKind::u, spec, max_m,
      moment_working_prec(ctx.target_digits + ctx.guard_digits, max_m));
}

MomentTable compute_v(const ProblemSpec& spec, int max_m, const PrecisionContext& ctx) {
  return MomentTable::guarded(
      MomentKind::v, spec, max_m,
      moment_working_prec(ctx.target_digits + ctx.guard_digits, max_m));
}

MomentTable compute_u_exact(const ProblemSpec& spec, int max_m) {
  return MomentTable::exact(MomentKind::u, spec, max_m);
}

MomentTable compute_v_exact(const ProblemSpec& spec, int max_m) {
  return MomentTable::exact(MomentKind::v, spec, max_m);
}

// ---- bounds battery -------------------------------------------------------

namespace {

enum class Verdict { holds, fails, unknown };

// x < y (or x <= y) for two entries with certified absolute error radii
Verdict entry_less(const Real& x, const Real& ex, const Real& y, const Real& ey,
                   bool strict) {
  Real xhi(x.prec() + 8), ylo(y.prec() + 8);
  mpfr_add(xhi.raw(), x.raw(), ex.raw(), MPFR_RNDU);
  mpfr_sub(ylo.raw(), y.raw(), ey.raw(), MPFR_RNDD);
  if (strict ? xhi.cmp(ylo) < 0 : xhi.cmp(ylo) <= 0) return Verdict::holds;
  Real xlo(x.prec() + 8), yhi(y.prec() + 8);
  mpfr_sub(xlo.raw(), x.raw(), ex.raw(), MPFR_RNDD);
  mpfr_add(yhi.raw(), y.raw(), ey.raw(), MPFR_RNDU);
  if (strict ? xlo.cmp(yhi) >= 0 : xlo.cmp(yhi) > 0) return Verdict::fails;
  return Verdict::unknown;
}

// x < q (or x <= q) against an exact rational
Verdict less_than_ratio(const Real& x, const Real& ex, const mpq_class& q,
                        bool strict) {
  Real xhi(x.prec() + 8);
  mpfr_add(xhi.raw(), x.raw(), ex.raw(), MPFR_RNDU);
  int hi = mpfr_cmp_q(xhi.raw(), q.get_mpq_t());
  if (strict ? hi < 0 : hi <= 0) return Verdict::holds;
  Real xlo(x.prec() + 8);
  mpfr_sub(xlo.raw(), x.raw(), ex.raw(), MPFR_RNDD);
  int lo = mpfr_cmp_q(xlo.raw(), q.get_mpq_t());
  if (strict ? lo >= 0 : lo > 0) return Verdict::fails;
  return Verdict::unknown;
}

// x > q (or x >= q)
Verdict greater_than_ratio(const Real& x, const Real& ex, const mpq_class& q,
                           bool strict) {
  Real xlo(x.prec() + 8);
  mpfr_sub(xlo.raw(), x.raw(), ex.raw(), MPFR_RNDD);
  int lo = mpfr_cmp_q(xlo.raw(), q.get_mpq_t());
  if (strict ? lo > 0 : lo >= 0) return Verdict::holds;
  Real xhi(x.prec() + 8);
  mpfr_add(xhi.raw(), x.raw(), ex.raw(), MPFR_RNDU);
  int hi = mpfr_cmp_q(xhi.raw(), q.get_mpq_t());
  if (strict ? hi <= 0 : hi < 0) return Verdict::fails;
  return Verdict::unknown;
}

// Equality against an exact rational. A finite-precision interval can refute
// equality but never confirm it, so the guarded check asserts consistency:
// it holds whenever q lies inside the certified interval.
Verdict consistent_with_ratio(const Real& x, const Real& ex, const mpq_class& q) {
  Real xhi(x.prec() + 8), xlo(x.prec() + 8);
  mpfr_add(xhi.raw(), x.raw(), ex.raw(), MPFR_RNDU);
  mpfr_sub(xlo.raw(), x.raw(), ex.raw(), MPFR_RNDD);
  if (mpfr_cmp_q(xhi.raw(), q.get_mpq_t()) < 0 ||
      mpfr_cmp_q(xlo.raw(), q.get_mpq_t()) > 0) {
    return Verdict::fails;
  }
  return Verdict::holds;
}

struct Battery {
  BoundsReport rep;

  void record(Verdict v, const char* claim, unsigned j, int m) {
    ++rep.checked;
    if (v == Verdict::fails) {
      rep.ok = false;
      if (rep.first_violation.empty()) {
        rep.first_violation = std::string(claim) + " at j=" + std::to_string(j) +
                              " m=" + std::to_string(m);
      }
    } else if (v == Verdict::unknown) {
      ++rep.unresolved;
      rep.complete = false;
      if (rep.first_unresolved.empty()) {
        rep.first_unresolved = std::string(claim) + " at j=" + std::to_string(j) +
                               " m=" + std::to_string(m);
      }
    }
  }
};

Verdict from_bool(bool ok) { return ok ? Verdict::holds : Verdict::fails; }

}  // namespace

BoundsReport check_bounds(const MomentTable& t) {
  Battery bat;
  const ProblemSpec& spec = t.spec();
  const unsigned b = spec.b;
  const bool two_one = (b == 2 && spec.d == 1);
  const bool exact = t.mode() == MomentMode::exact;
  const bool is_u = t.kind() == MomentKind::u;
  const unsigned rows = t.rows();
  const int mm = t.max_m();

  // f = largest digit other than 0 and d; absent only for base 2 with d = 1
  unsigned f = 0;
  for (unsigned a = b - 1; a > 0; --a) {
    if (a != spec.d) { f = a; break; }
  }

  std::vector<std::vector<Real>> val(rows), err(rows);
  if (!exact) {
    for (unsigned j = 0; j < rows; ++j) {
      for (int m = 0; m <= mm; ++m) {
        val[j].push_back(t.at(j, m));
        err[j].push_back(t.entry_error(j, m));
      }
    }
  }

  for (unsigned j = 0; j < rows; ++j) {
    // the row along which the measure is a pure point mass at the origin:
    // u entries vanish for m >= 1, v entries stay equal to b
    const bool degenerate_row = two_one && j == 0;
    for (int m = 0; m <= mm; ++m) {
      if (m == 0) {
        bat.record(exact ? from_bool(t.scaled_num(j, 0) == b * t.scale(0))
                         : consistent_with_ratio(val[j][0], err[j][0], mpq_class(b)),
                   "total mass == b", j, 0);
        continue;
      }
      mpq_class cap(mpz_class(b), mpz_class(m + 1));
      cap.canonicalize();

      if (is_u) {
        if (degenerate_row) {
          bat.record(exact ? from_bool(t.scaled_num(0, m) == 0)
                           : consistent_with_ratio(val[0][m], err[0][m], mpq_class(0)),
                     "u == 0 on the point-mass row", j, m);
        } else {
          bat.record(exact ? from_bool(t.scaled_num(j, m) > 0)
                           : greater_than_ratio(val[j][m], err[j][m], mpq_class(0), true),
                     "u > 0", j, m);
          bat.record(exact ? from_bool((m + 1) * t.scaled_num(j, m) < b * t.scale(m))
                           : less_than_ratio(val[j][m], err[j][m], cap, true),
                     "u < b/(m+1)", j, m);
        }
        if (j + 1 < rows) {
          bat.record(exact ? from_bool(t.scaled_num(j, m) < t.scaled_num(j + 1, m))
                           : entry_less(val[j][m], err[j][m], val[j + 1][m],
                                        err[j + 1][m], true),
                     "u strictly increasing in k", j, m);
        }
      } else {
        bat.record(exact ? from_bool((m + 1) * t.scaled_num(j, m) > b * t.scale(m))
                         : greater_than_ratio(val[j][m], err[j][m], cap, true),
                   "v > b/(m+1)", j, m);
        if (degenerate_row) {
          bat.record(exact ? from_bool(t.scaled_num(0, m) == b * t.scale(m))
                           : consistent_with_ratio(val[0][m], err[0][m], mpq_class(b)),
                     "v == b on the point-mass row", j, m);
        } else {
          bat.record(exact ? from_bool(t.scaled_num(j, m) < b * t.scale(m))
                           : less_than_ratio(val[j][m], err[j][m], mpq_class(b), true),
                     "v < b", j, m);
        }
        if (j + 1 < rows) {
          bat.record(exact ? from_bool(t.scaled_num(j + 1, m) < t.scaled_num(j, m))
                           : entry_less(val[j + 1][m], err[j + 1][m], val[j][m],
                                        err[j][m], true),
                     "v strictly decreasing in k", j, m);
        }
      }

      // monotone along m, strictly so once entries are positive and the
      // measure has mass away from the origin. On the point-mass row the
      // entries are constant (v) or constant zero (u, from m = 1 on), which
      // the equality claims above already pin down, so skip the comparison
      // except for the one genuine drop u: b -> 0 at m = 1.
      if (!degenerate_row || (is_u && m == 1)) {
        if (exact) {
          mpz_class lhs = t.scaled_num(j, m) * t.scale(m - 1);
          mpz_class rhs = t.scaled_num(j, m - 1) * t.scale(m);
          bat.record(from_bool(lhs < rhs), "strictly decreasing in m", j, m);
        } else {
          bat.record(entry_less(val[j][m], err[j][m], val[j][m - 1], err[j][m - 1],
                                true),
                     "strictly decreasing in m", j, m);
        }
      }

      // two-sided envelope for the bottom row of u against (f/(b-1))^m
      if (is_u && j == 0 && f > 0) {
        mpz_class fp, bp;
        mpz_ui_pow_ui(fp.get_mpz_t(), f, static_cast<unsigned long>(m));
        mpz_ui_pow_ui(bp.get_mpz_t(), b - 1, static_cast<unsigned long>(m));
        mpq_class lo(fp, bp * (m + 1));
        lo.canonicalize();
        mpq_class hi = lo * b;
        if (exact) {
          mpz_class mid = (m + 1) * bp * t.scaled_num(0, m);
          bat.record(from_bool(fp * t.scale(m) < mid), "bottom-row lower envelope",
                     j, m);
          bat.record(from_bool(mid < b * fp * t.scale(m)), "bottom-row upper envelope",
                     j, m);
        } else {
          bat.record(greater_than_ratio(val[0][m], err[0][m], lo, true),
                     "bottom-row lower envelope", j, m);
          bat.record(less_than_ratio(val[0][m], err[0][m], hi, true),
                     "bottom-row upper envelope", j, m);
        }
      }
    }
  }
  return bat.rep;
}

}  // namespace irwin
