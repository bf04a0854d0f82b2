#include "irwin/series.hpp"

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irwin/errors.hpp"
#include "irwin/moments.hpp"

namespace irwin {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0)
      .count();
}

// Enumerating the level-l block scans b^l integers and keeps two working
// variables per integer; past this size memory and per-term cost stop being
// reasonable, and level 1 handles the base instead.
constexpr u64 kLevelScanBudget = u64{1} << 20;

// In base 2 every positive integer contains the digit 1, so the
// exactly-zero-ones sum is empty.
bool degenerate_target(const ProblemSpec& spec, unsigned j) {
  return spec.b == 2 && spec.d == 1 && j == 0;
}

long term_cap(long digits, const SeriesConfig& cfg) {
  if (cfg.max_terms > 0) return std::max<long>(cfg.max_terms, 1);
  return std::max<long>(2000, 30 * digits);
}

// 10^e rounded downward, for threshold comparisons: bound < pow10_down(e)
// implies bound < 10^e.
Real pow10_down(long e) {
  Real r(kBoundPrec);
  mpfr_set_ui(r.raw(), 10, MPFR_RNDN);
  mpfr_pow_si(r.raw(), r.raw(), e, MPFR_RNDD);
  return r;
}

// Smallest M whose tail bound clears 10^-(digits+2), estimated in log10
// space.  Sizing only: certification never relies on this estimate.
long estimate_terms(unsigned b, int level, long digits, long cap) {
  if (level < 2) return std::min<long>(cap, 256);
  const double lb = std::log10(static_cast<double>(b));
  for (long m = 1; m <= cap; ++m) {
    double lg = std::log10(2.0) +
                (-static_cast<double>(m) * (level - 1) + 3 - level) * lb -
                std::log10(static_cast<double>(m + 2));
    if (lg < -static_cast<double>(digits + 2))
      return std::min<long>(cap, m + 8 + m / 8);
  }
  return cap;
}

mpfr_prec_t series_working_prec(unsigned b, int level, long digits,
                                long m_est) {
  long extra =
      static_cast<long>(std::ceil(level * std::log10(static_cast<double>(b)))) +
      static_cast<long>(
          std::ceil(std::log10(static_cast<double>(m_est + 2)))) +
      18;
  int m_for_prec = static_cast<int>(std::min<long>(m_est, 1 << 28));
  mpfr_prec_t w = moment_working_prec(digits + extra, m_for_prec);
  return std::max<mpfr_prec_t>(w, 192);
}

// First-order relative rounding envelope for one assembled series term:
// table entries contribute O((depth+1)(m+3)^2) rounding units, the power
// stream O(m), the group sums O(b^l), plus a fixed cushion.  Everything is
// doubled against higher-order terms, and rho < 2^-20 is asserted so the
// doubling provably absorbs them.
Real term_rho(unsigned depth, long m, u64 scan, mpfr_prec_t w) {
  u64 units = 8 * (u64{depth} + 1) * (u64(m) + 3) * (u64(m) + 3) +
              8 * u64(m) + 4 * scan + 32;
  Real rho = up_mul(up_ui(units), up_pow2(-static_cast<long>(w)));
  if (rho.cmp_d(0x1p-20) >= 0)
    throw std::logic_error("working precision too small for the term count");
  return rho;
}

struct TargetState {
  unsigned j = 0;
  size_t slot = 0;  // index into the result vector
  Real sum;         // working precision
  Real prefix;      // working precision
  Real prefix_err;  // upward bound
  Real env;         // upward rounding envelope
  Real tail;        // upward truncation bound at stop
  Real last_tail;   // candidate from the most recent term, for cap exits
  bool done = false;
  long terms = 0;
};

// Shared evaluation core: one coefficient table and one power stream serve
// every requested count.  `targets` is ascending; `digits` is the per-target
// precision goal.
std::vector<SeriesResult> run_engine(const ProblemSpec& spec, long digits,
                                     const SeriesConfig& cfg,
                                     const std::vector<unsigned>& targets) {
  const auto t0 = clock_type::now();
  const bool alternating = cfg.variant == Variant::alternating;

  int level = cfg.level == 0 ? choose_level(spec, digits) : cfg.level;
  if (level < 1 || level > 4)
    throw std::invalid_argument("series level must be between 1 and 4");
  const u64 hi = upow(spec.b, static_cast<unsigned>(level));
  if (hi > kLevelScanBudget)
    throw BudgetExceeded(
        "level block too large to enumerate; rerun with level 1");
  const u64 lo = hi / spec.b;

  std::vector<SeriesResult> out(targets.size());
  std::vector<TargetState> live;
  unsigned depth = 0;
  for (size_t t = 0; t < targets.size(); ++t) {
    out[t].level = level;
    out[t].variant = cfg.variant;
    if (degenerate_target(spec, targets[t])) {
      out[t].degenerate_zero = true;
      out[t].achieved = true;
      continue;
    }
    TargetState s;
    s.j = targets[t];
    s.slot = t;
    live.push_back(std::move(s));
    depth = std::max(depth, targets[t]);
  }
  if (live.empty()) {
    double el = ms_since(t0);
    for (auto& r : out) r.elapsed_ms = el;
    return out;
  }

  const long cap = term_cap(digits, cfg);
  const long m_est = estimate_terms(spec.b, level, digits, cap);
  const mpfr_prec_t w = series_working_prec(spec.b, level, digits, m_est);
  const Real tau = [&] {
    Real t_ = pow10_down(-(digits + 2));
    mpfr_div_ui(t_.raw(), t_.raw(), 4, MPFR_RNDD);
    return t_;
  }();
  const Real thr = pow10_down(-digits);
  const Real one = up_ui(1);

  MomentTable table =
      MomentTable::guarded(alternating ? MomentKind::u : MomentKind::v,
                           ProblemSpec{spec.b, spec.d, depth},
                           static_cast<int>(std::min<long>(m_est, cap)), w);

  // Plain harmonic prefix over lengths < level, one block per length.
  for (auto& s : live) {
    s.sum = Real(w);
    s.prefix = Real(w);
    for (int lam = 1; lam < level; ++lam) {
      BlockSum bs =
          block_sum(ProblemSpec{spec.b, spec.d, s.j}, static_cast<unsigned>(lam), w);
      s.prefix.add(bs.value);
      s.prefix_err = up_add(s.prefix_err, bs.error_bound);
    }
    if (level > 1 && !s.prefix.is_zero())
      s.prefix_err = up_add(
          s.prefix_err,
          up_mul_ui(up_pow2(mpfr_get_exp(s.prefix.raw()) - w),
                    static_cast<unsigned long>(level - 1)));
  }

  // Level-l integers bucketed by how often they contain d; counts above the
  // deepest requested row never contribute.
  const unsigned gmax = std::min<unsigned>(depth, static_cast<unsigned>(level));
  std::vector<std::vector<u64>> groups(gmax + 1);
  for (u64 n = lo; n < hi; ++n) {
    unsigned c = count_digit(n, spec.b, spec.d);
    if (c <= gmax) groups[c].push_back(n);
  }
  const unsigned delta = alternating ? 0 : 1;  // powers of 1/n vs 1/(n+1)
  std::vector<std::vector<Real>> inv(gmax + 1), pw(gmax + 1);
  for (unsigned i = 0; i <= gmax; ++i) {
    inv[i].reserve(groups[i].size());
    pw[i].reserve(groups[i].size());
    for (u64 n : groups[i]) {
      Real x(w);
      mpfr_set_ui(x.raw(), n + delta, MPFR_RNDN);
      mpfr_ui_div(x.raw(), 1, x.raw(), MPFR_RNDN);
      inv[i].push_back(std::move(x));
      pw[i].push_back(Real(w));
    }
  }
  // Uniform upper bound on the power ratio, for the positive-variant tail.
  Real xmax_up(kBoundPrec);
  if (level == 1)
    xmax_up = up_pow2(-1);
  else
    xmax_up = up_pow_si(spec.b, -(level - 1));

  std::vector<Real> t_sum(gmax + 1);
  std::vector<Real> uval(depth + 1);
  for (auto& t_ : t_sum) t_ = Real(w);
  Real term(w), psum(w);

  for (long m = 0;; ++m) {
    bool all_done = true;
    for (const auto& s : live)
      if (!s.done) all_done = false;
    if (all_done) break;
    if (m >= cap) {
      // The stashed candidate bounds the tail from this index onward.
      for (auto& s : live)
        if (!s.done) {
          s.tail = s.last_tail;
          s.done = true;
        }
      break;
    }
    if (m > table.max_m())
      table.extend(static_cast<int>(
          std::min<long>(std::max<long>(2L * table.max_m(), m + 64), cap)));

    // Advance every power stream one step and refresh the group sums.
    for (unsigned i = 0; i <= gmax; ++i) {
      t_sum[i].set_zero();
      auto& pvec = pw[i];
      auto& ivec = inv[i];
      for (size_t idx = 0; idx < pvec.size(); ++idx) {
        if (m == 0)
          pvec[idx].set(ivec[idx]);
        else
          pvec[idx].mul(ivec[idx]);
        t_sum[i].add(pvec[idx]);
      }
    }

    const Real rho = term_rho(depth, m, hi, w);
    const Real one_plus_rho = up_add(one, rho);
    for (unsigned r = 0; r <= depth; ++r) uval[r] = table.at(r, m);

    for (auto& s : live) {
      if (s.done) continue;
      term.set_zero();
      const unsigned imax = std::min<unsigned>(s.j, gmax);
      for (unsigned i = 0; i <= imax; ++i)
        if (!groups[i].empty()) term.addmul(uval[s.j - i], t_sum[i]);

      const Real term_up = up_mul(up_abs(term), one_plus_rho);
      Real tail_c;
      if (alternating) {
        // Per-integer alternating remainders are bounded by their next
        // term, and both factors of each term are non-increasing in m, so
        // the whole tail is bounded by the current term.
        tail_c = term_up;
      } else {
        // Positive variant: masses are capped by b and the powers shrink
        // geometrically, so the tail past this term is at most
        // 2*b*xmax * (current power sum over the contributing integers).
        psum.set_zero();
        for (unsigned i = 0; i <= imax; ++i) psum.add(t_sum[i]);
        Real p_up = up_mul(up_abs(psum), one_plus_rho);
        tail_c = up_mul(up_mul_ui(xmax_up, 2 * spec.b), p_up);
      }
      s.last_tail = tail_c;

      if (alternating && (m & 1))
        s.sum.sub(term);
      else
        s.sum.add(term);
      s.terms = m + 1;
      s.env = up_add(s.env, up_mul(term_up, rho));
      if (!s.sum.is_zero())
        s.env = up_add(s.env, up_pow2(mpfr_get_exp(s.sum.raw()) - w));

      if (mpfr_less_p(tail_c.raw(), tau.raw())) {
        s.tail = std::move(tail_c);
        s.done = true;
      }
    }
  }

  const double el = ms_since(t0);
  for (auto& s : live) {
    SeriesResult& r = out[s.slot];
    r.value = Real(w);
    r.value.set(s.prefix);
    r.value.add(s.sum);
    Real err = up_add(s.prefix_err, up_add(s.env, s.tail));
    if (!r.value.is_zero())
      err = up_add(err, up_pow2(mpfr_get_exp(r.value.raw()) - w));
    r.achieved = mpfr_less_p(err.raw(), thr.raw());
    r.error_bound = std::move(err);
    r.terms = s.terms;
  }
  for (auto& r : out) r.elapsed_ms = el;
  return out;
}

}  // namespace

int choose_level(const ProblemSpec& spec, long digits) {
  const u64 b = spec.b;
  if (b * b > kLevelScanBudget) return 1;
  if (digits > 800 && b <= 3) return 4;
  if (digits > 500 && b * b * b <= kLevelScanBudget) return 3;
  return 2;
}

Real truncation_bound(unsigned b, int level, long m) {
  if (level < 2)
    throw std::invalid_argument("truncation_bound requires level >= 2");
  if (m < 0) throw std::invalid_argument("term index must be nonnegative");
  Real p = up_pow_si(b, -m * (level - 1) + 3 - level);
  return up_div_ui(p, static_cast<unsigned long>(m) + 2);
}

SeriesResult irwin_sum(const ProblemSpec& spec, long digits,
                       const SeriesConfig& cfg) {
  spec.validate();
  if (digits < 1 || digits > 1000000)
    throw std::invalid_argument("digits must be between 1 and 1000000");
  if (!cfg.at_most || spec.k == 0) {
    auto res = run_engine(spec, digits, cfg, {spec.k});
    return std::move(res.front());
  }

  // At-most-k: evaluate every count with a goal tight enough that the k+1
  // certified bounds still sum below the requested one.
  long per = digits +
             static_cast<long>(
                 std::ceil(std::log10(static_cast<double>(spec.k + 1)))) +
             1;
  std::vector<unsigned> targets(spec.k + 1);
  std::iota(targets.begin(), targets.end(), 0u);
  auto parts = run_engine(spec, per, cfg, targets);

  mpfr_prec_t w = 64;
  for (const auto& p : parts) w = std::max(w, p.value.prec());
  SeriesResult r;
  r.value = Real(w);
  r.level = parts.back().level;
  r.variant = parts.back().variant;
  r.elapsed_ms = parts.back().elapsed_ms;
  bool all_achieved = true;
  for (auto& p : parts) {
    r.value.add(p.value);
    r.error_bound = up_add(r.error_bound, p.error_bound);
    r.terms = std::max(r.terms, p.terms);
    all_achieved = all_achieved && p.achieved;
  }
  if (!r.value.is_zero())
    r.error_bound =
        up_add(r.error_bound,
               up_mul_ui(up_pow2(mpfr_get_exp(r.value.raw()) - w), spec.k));
  r.achieved = all_achieved &&
               mpfr_less_p(r.error_bound.raw(), pow10_down(-digits).raw());
  return r;
}

std::vector<SeriesResult> irwin_sum_per_count(const ProblemSpec& spec,
                                              long digits,
                                              const SeriesConfig& cfg) {
  spec.validate();
  if (digits < 1 || digits > 1000000)
    throw std::invalid_argument("digits must be between 1 and 1000000");
  std::vector<unsigned> targets(spec.k + 1);
  std::iota(targets.begin(), targets.end(), 0u);
  return run_engine(spec, digits, cfg, targets);
}

SeriesResult prefix_tail(const ProblemSpec& spec, u64 n, long digits,
                         Variant variant) {
  spec.validate();
  if (digits < 1 || digits > 1000000)
    throw std::invalid_argument("digits must be between 1 and 1000000");
  if (n < 1) throw std::invalid_argument("prefix must be a positive integer");
  const unsigned c = count_digit(n, spec.b, spec.d);
  if (c > spec.k)
    throw std::invalid_argument(
        "prefix already contains the digit more than k times");
  const unsigned j = spec.k - c;
  const auto t0 = clock_type::now();
  const bool alternating = variant == Variant::alternating;

  SeriesResult r;
  r.variant = variant;
  r.level = static_cast<int>(digit_length(n, spec.b));

  const SeriesConfig none{};
  const long cap = term_cap(digits, none);
  // The W formula depends on the term count only logarithmically; charging
  // a generous cap keeps the envelope valid however far the loop runs.
  const mpfr_prec_t w = series_working_prec(spec.b, 1, digits + 4, 1L << 26);
  const Real tau = [&] {
    Real t_ = pow10_down(-(digits + 2));
    mpfr_div_ui(t_.raw(), t_.raw(), 4, MPFR_RNDD);
    return t_;
  }();
  const Real thr = pow10_down(-digits);
  const Real one = up_ui(1);

  MomentTable table =
      MomentTable::guarded(alternating ? MomentKind::u : MomentKind::v,
                           ProblemSpec{spec.b, spec.d, j}, 256, w);

  const unsigned long base_den = n + (alternating ? 0 : 1);
  Real x(w);
  mpfr_set_ui(x.raw(), base_den, MPFR_RNDN);
  mpfr_ui_div(x.raw(), 1, x.raw(), MPFR_RNDN);
  Real x_up(kBoundPrec);
  mpfr_set_ui(x_up.raw(), base_den, MPFR_RNDU);
  mpfr_ui_div(x_up.raw(), 1, x_up.raw(), MPFR_RNDU);

  Real sum(w), pwv(w), term(w);
  Real env, tail, last_tail;
  bool done = false;

  for (long m = 0;; ++m) {
    if (m >= cap) {
      tail = last_tail;
      break;
    }
    if (m > table.max_m())
      table.extend(static_cast<int>(
          std::min<long>(std::max<long>(2L * table.max_m(), m + 64), cap)));
    if (m == 0)
      pwv.set(x);
    else
      pwv.mul(x);

    term.set(table.at(j, m));
    term.mul(pwv);
    const Real rho = term_rho(j, m, 1, w);
    const Real one_plus_rho = up_add(one, rho);
    const Real term_up = up_mul(up_abs(term), one_plus_rho);
    Real tail_c;
    if (alternating) {
      tail_c = term_up;
    } else {
      Real p_up = up_mul(up_abs(pwv), one_plus_rho);
      tail_c = up_mul(up_mul_ui(x_up, 2 * spec.b), p_up);
    }
    last_tail = tail_c;

    if (alternating && (m & 1))
      sum.sub(term);
    else
      sum.add(term);
    r.terms = m + 1;
    env = up_add(env, up_mul(term_up, rho));
    if (!sum.is_zero())
      env = up_add(env, up_pow2(mpfr_get_exp(sum.raw()) - w));

    if (mpfr_less_p(tail_c.raw(), tau.raw())) {
      tail = std::move(tail_c);
      done = true;
      break;
    }
  }
  (void)done;

  r.value = std::move(sum);
  Real err = up_add(env, tail);
  r.achieved = mpfr_less_p(err.raw(), thr.raw());
  r.error_bound = std::move(err);
  r.elapsed_ms = ms_since(t0);
  return r;
}

Real limit_value(unsigned b, mpfr_prec_t prec) {
  if (b < 2) throw std::invalid_argument("base must be at least 2");
  Real r(prec);
  mpfr_set_ui(r.raw(), b, MPFR_RNDN);
  mpfr_log(r.raw(), r.raw(), MPFR_RNDN);
  r.mul_ui(b);
  return r;
}

Real limit_prefix_value(unsigned b, u64 n, mpfr_prec_t prec) {
  if (b < 2) throw std::invalid_argument("base must be at least 2");
  if (n < 1) throw std::invalid_argument("prefix must be a positive integer");
  mpq_class q(static_cast<unsigned long>(n) + 1, static_cast<unsigned long>(n));
  q.canonicalize();
  Real r = log_of_q(q, prec);
  r.mul_ui(b);
  return r;
}

DecimalResult evaluate_decimal(const ProblemSpec& spec, long digits,
                               const SeriesConfig& cfg,
                               const PrecisionContext& ctx) {
  const long guard = std::max<long>(ctx.guard_digits, 8);
  SeriesResult best;
  bool have = false;
  for (int attempt = 0; attempt <= ctx.max_retries; ++attempt) {
    const long internal = digits + guard * ((1L << attempt) - 1);
    SeriesResult r = irwin_sum(spec, internal, cfg);
    const bool capped = !r.achieved && r.terms >= term_cap(internal, cfg);
    if (!have || mpfr_less_p(r.error_bound.raw(), best.error_bound.raw())) {
      best = std::move(r);
      have = true;
    }
    if (best.achieved &&
        !rounding_ambiguous(best.value, best.error_bound, digits))
      break;
    // A hard term-cap exit will not improve with a wider goal.
    if (capped) break;
  }
  if (best.achieved && rounding_ambiguous(best.value, best.error_bound, digits))
    throw PrecisionNotAchieved(
        "decimal rounding stayed ambiguous at the requested precision");
  DecimalResult out;
  out.text = to_fixed(best.value, digits);
  out.detail = std::move(best);
  return out;
}

}  // namespace irwin
