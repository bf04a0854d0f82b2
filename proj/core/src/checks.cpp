#include "irwin/checks.hpp"

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <set>
#include <utility>
#include <vector>

#include "irwin/digits.hpp"
#include "irwin/measure.hpp"
#include "irwin/moments.hpp"
#include "irwin/real.hpp"
#include "irwin/series.hpp"

namespace irwin::checks {

namespace {

using clk = std::chrono::steady_clock;

double ms_since(clk::time_point t0) {
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string fmt(const Real& v) { return fmt(mpfr_get_d(v.raw(), MPFR_RNDN)); }

std::string describe(const ProblemSpec& s) {
  return "b=" + std::to_string(s.b) + " d=" + std::to_string(s.d) +
         " k=" + std::to_string(s.k);
}

// Rigorous upper bound on |a - b|.
Real diff_upper(const Real& a, const Real& b) {
  const mpfr_prec_t p = std::max(a.prec(), b.prec()) + 8;
  Real d1(p), d2(p);
  mpfr_sub(d1.raw(), a.raw(), b.raw(), MPFR_RNDU);
  mpfr_sub(d2.raw(), b.raw(), a.raw(), MPFR_RNDU);
  return mpfr_cmp(d1.raw(), d2.raw()) < 0 ? std::move(d2) : std::move(d1);
}

bool cert_within(const Real& a, const Real& ea, const Real& b, const Real& eb) {
  Real d = diff_upper(a, b);
  Real allow = up_add(ea, eb);
  return mpfr_lessequal_p(d.raw(), allow.raw()) != 0;
}

// a - ea > b + eb: the inequality a > b holds for every pair of values
// inside the two certified intervals.
bool cert_greater(const Real& a, const Real& ea, const Real& b,
                  const Real& eb) {
  Real alo(a.prec() + 8), bhi(b.prec() + 8);
  mpfr_sub(alo.raw(), a.raw(), ea.raw(), MPFR_RNDD);
  mpfr_add(bhi.raw(), b.raw(), eb.raw(), MPFR_RNDU);
  return mpfr_greater_p(alo.raw(), bhi.raw()) != 0;
}

bool cert_greater_q(const Real& a, const Real& ea, const mpq_class& q) {
  Real alo(a.prec() + 8);
  mpfr_sub(alo.raw(), a.raw(), ea.raw(), MPFR_RNDD);
  return mpfr_cmp_q(alo.raw(), q.get_mpq_t()) > 0;
}

Real pow10(long e, mpfr_rnd_t rnd) {
  Real r(kBoundPrec);
  mpfr_set_ui(r.raw(), 10, MPFR_RNDN);
  mpfr_pow_si(r.raw(), r.raw(), e, rnd);
  return r;
}

void run_check(BatteryReport& rep, const Progress& progress, const char* name,
               double limit_ms, const std::function<bool(std::string&)>& body) {
  CheckResult r;
  r.name = name;
  r.limit_ms = limit_ms;
  const auto t0 = clk::now();
  try {
    r.pass = body(r.detail);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.elapsed_ms = ms_since(t0);
  if (r.pass && limit_ms > 0 && r.elapsed_ms > limit_ms) {
    r.pass = false;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  rep.all_pass = rep.all_pass && r.pass;
  rep.total_ms += r.elapsed_ms;
  if (progress) progress(r);
  rep.results.push_back(std::move(r));
}

// --- check bodies, parameterized so the fast battery can reuse them ---

bool body_degenerate(std::string& detail) {
  auto r = irwin_sum({2, 1, 0}, 50);
  detail = fmt(r.elapsed_ms) + " ms";
  return r.degenerate_zero && r.value.is_zero() && r.error_bound.is_zero();
}

bool body_two(std::string& detail) {
  auto r = irwin_sum({2, 1, 1}, 50);
  Real two(64);
  two.set_ui(2);
  Real diff = diff_upper(r.value, two);
  Real thr = pow10(-50, MPFR_RNDD);
  detail = "|value-2|=" + fmt(diff) + " bound=" + fmt(r.error_bound);
  return r.achieved && mpfr_less_p(diff.raw(), thr.raw()) &&
         mpfr_less_p(r.error_bound.raw(), thr.raw());
}

std::vector<SeriesResult> agreement_runs(const std::vector<ProblemSpec>& specs,
                                         long digits,
                                         const std::vector<int>& levels) {
  std::vector<SeriesResult> out;
  for (const auto& sp : specs)
    for (Variant var : {Variant::alternating, Variant::positive})
      for (int lvl : levels) {
        SeriesConfig cfg;
        cfg.level = lvl;
        cfg.variant = var;
        out.push_back(irwin_sum(sp, digits, cfg));
      }
  return out;
}

bool body_agreement(const std::vector<ProblemSpec>& specs, long digits,
                    const std::vector<int>& levels,
                    std::vector<SeriesResult>* capture, std::string& detail) {
  auto runs = agreement_runs(specs, digits, levels);
  const size_t per = 2 * levels.size();
  double worst = 0;
  for (size_t s = 0; s < specs.size(); ++s) {
    for (size_t i = 0; i < per; ++i)
      for (size_t j = i + 1; j < per; ++j) {
        const auto& a = runs[s * per + i];
        const auto& b = runs[s * per + j];
        if (!cert_within(a.value, a.error_bound, b.value, b.error_bound)) {
          detail = describe(specs[s]) + " pair " + std::to_string(i) + "/" +
                   std::to_string(j) + " disagrees beyond summed bounds";
          return false;
        }
        Real d = diff_upper(a.value, b.value);
        Real allow = up_add(a.error_bound, b.error_bound);
        if (!d.is_zero() && !allow.is_zero()) {
          double ratio = mpfr_get_d(d.raw(), MPFR_RNDN) /
                         mpfr_get_d(allow.raw(), MPFR_RNDN);
          worst = std::max(worst, ratio);
        }
      }
  }
  if (capture) *capture = std::move(runs);
  detail = "worst |diff|/bounds = " + fmt(worst);
  return true;
}

bool body_moment_closed(int max_m, std::string& detail) {
  auto t = compute_u_exact({2, 1, 1}, max_m);
  for (int m = 0; m <= max_m; ++m) {
    mpq_class expect(2, (mpz_class(1) << (m + 1)) - 1);
    expect.canonicalize();
    if (t.exact_at(1, m) != expect) {
      detail = "mismatch at m=" + std::to_string(m);
      return false;
    }
  }
  detail = "all m <= " + std::to_string(max_m) + " exact";
  return true;
}

bool body_hand_values(std::string& detail) {
  auto tu = compute_u_exact({10, 9, 0}, 1);
  auto tv = compute_v_exact({10, 9, 0}, 1);
  mpq_class eu(360, 91), ev(550, 91);
  eu.canonicalize();
  ev.canonicalize();
  if (tu.exact_at(0, 1) != eu) {
    detail = "first moment != 360/91";
    return false;
  }
  if (tv.exact_at(0, 1) != ev) {
    detail = "first complementary moment != 550/91";
    return false;
  }
  detail = "360/91 and 550/91 reproduced";
  return true;
}

bool body_invariants(const std::vector<unsigned>& bases, unsigned kmax,
                     int max_m, std::string& detail) {
  long checked = 0;
  int exact_escalations = 0;
  for (unsigned b : bases) {
    std::set<unsigned> ds{0u, b - 1, b / 2};
    for (unsigned d : ds) {
      const ProblemSpec sp{b, d, kmax};
      bool complete = false;
      for (long p : {60L, 240L, 960L}) {
        const mpfr_prec_t w = moment_working_prec(p, max_m);
        auto ru = check_bounds(MomentTable::guarded(MomentKind::u, sp, max_m, w));
        auto rv = check_bounds(MomentTable::guarded(MomentKind::v, sp, max_m, w));
        checked += ru.checked + rv.checked;
        if (!ru.ok) {
          detail = describe(sp) + ": " + ru.first_violation;
          return false;
        }
        if (!rv.ok) {
          detail = describe(sp) + ": " + rv.first_violation;
          return false;
        }
        if (ru.complete && rv.complete) {
          complete = true;
          break;
        }
      }
      if (!complete) {
        ++exact_escalations;
        auto ru = check_bounds(compute_u_exact(sp, max_m));
        auto rv = check_bounds(compute_v_exact(sp, max_m));
        checked += ru.checked + rv.checked;
        if (!ru.ok) {
          detail = describe(sp) + " (exact): " + ru.first_violation;
          return false;
        }
        if (!rv.ok) {
          detail = describe(sp) + " (exact): " + rv.first_violation;
          return false;
        }
      }
    }
  }
  detail = std::to_string(checked) + " predicates, " +
           std::to_string(exact_escalations) + " exact escalations";
  return true;
}

bool body_measure_moments(int max_len, unsigned kmax, int max_m,
                          bool require_small_tail, std::string& detail) {
  MeasureOptions opts;
  opts.allow_implicit_overflow = true;
  const ProblemSpec top{2, 1, kmax};
  auto mm = moment_matrix(top, max_m, max_len, false);
  auto mc = moment_matrix(top, max_m, max_len, true);
  auto tu = compute_u_exact(top, max_m);
  auto tv = compute_v_exact(top, max_m);
  Real thr = pow10(-30, MPFR_RNDD);
  mpq_class worst = 0;
  for (unsigned j = 0; j <= kmax; ++j) {
    mpq_class tail = build_measure({2, 1, j}, max_len, opts).tail_mass();
    if (require_small_tail &&
        mpfr_cmp_q(thr.raw(), tail.get_mpq_t()) <= 0) {
      detail = "tail for k=" + std::to_string(j) + " not below 1e-30";
      return false;
    }
    for (int m = 0; m <= max_m; ++m) {
      mpq_class du = mm[j][m] - tu.exact_at(j, m);
      if (du < 0) du = -du;
      mpq_class dv = mc[j][m] - tv.exact_at(j, m);
      if (dv < 0) dv = -dv;
      if (du > tail || dv > tail) {
        detail = "enumeration/recurrence gap beyond tail at j=" +
                 std::to_string(j) + " m=" + std::to_string(m);
        return false;
      }
      worst = std::max(worst, std::max(du, dv));
    }
  }
  detail = "worst gap " + fmt(worst.get_d());
  return true;
}

bool body_flatness(std::string& detail) {
  MeasureOptions opts;
  opts.allow_implicit_overflow = true;
  const int max_len = 120;
  mpq_class worst_ratio = 0;
  for (unsigned k = 1; k <= 8; ++k) {
    auto mu = build_measure({2, 1, k}, max_len, opts);
    const mpq_class tail = mu.tail_mass();
    for (int depth = 1; depth <= 4 && depth <= static_cast<int>(k); ++depth) {
      const long blocks = 1L << depth;
      for (long i = 0; i < blocks; ++i) {
        mpq_class t(i, blocks), u(i + 1, blocks);
        t.canonicalize();
        u.canonicalize();
        mpq_class dev = mass(mu, t, u).value - 2 * (u - t);
        if (dev < 0) dev = -dev;
        if (dev > tail) {
          detail = "k=" + std::to_string(k) + " depth=" +
                   std::to_string(depth) + " block " + std::to_string(i) +
                   ": |mass - 2(u-t)| exceeds tail";
          return false;
        }
        if (tail > 0) {
          mpq_class ratio = dev / tail;
          if (ratio > worst_ratio) worst_ratio = ratio;
        }
      }
    }
  }
  detail = "worst |dev|/tail = " + fmt(worst_ratio.get_d());
  return true;
}

bool body_monotonicity(std::string& detail) {
  // The inter-count gaps contract by 1/(b^2-b+1) per step, reaching ~1e-57
  // by k=29, and the last value sits only ~3e-59 above the limit; certifying
  // the strict inequalities therefore needs bounds well below that scale.
  auto nine = irwin_sum_per_count({10, 9, 30}, 65);
  Real lim = limit_value(10, 400);
  Real lim_slack = up_pow2(-220);
  for (unsigned k = 1; k + 1 <= 30; ++k) {
    if (!cert_greater(nine[k].value, nine[k].error_bound, nine[k + 1].value,
                      nine[k + 1].error_bound)) {
      detail = "b=10 d=9: no certified decrease at k=" + std::to_string(k);
      return false;
    }
  }
  for (unsigned k = 1; k <= 30; ++k) {
    if (!cert_greater(nine[k].value, nine[k].error_bound, lim, lim_slack)) {
      detail = "b=10 d=9: value at k=" + std::to_string(k) +
               " not above 10*ln(10)";
      return false;
    }
  }
  auto zero = irwin_sum_per_count({10, 0, 30}, 65);
  for (unsigned k = 0; k + 1 <= 30; ++k) {
    if (!cert_greater(zero[k].value, zero[k].error_bound, zero[k + 1].value,
                      zero[k + 1].error_bound)) {
      detail = "b=10 d=0: no certified decrease at k=" + std::to_string(k);
      return false;
    }
  }
  Real gap(192);
  mpfr_sub(gap.raw(), nine[30].value.raw(), lim.raw(), MPFR_RNDN);
  detail = "last gap above limit " + fmt(gap);
  return true;
}

bool body_floor(std::string& detail) {
  mpq_class floor_q(6, 5);
  floor_q.canonicalize();
  double worst_margin = 1e300;
  for (unsigned b = 3; b <= 12; ++b) {
    for (unsigned d = 1; d < b; ++d) {
      auto r = irwin_sum({b, d, 0}, 30);
      mpq_class half_b(b, 2);
      half_b.canonicalize();
      Real rhs = log_of_q(half_b, 192);
      mpfr_mul_ui(rhs.raw(), rhs.raw(), b, MPFR_RNDN);
      if (!cert_greater(r.value, r.error_bound, rhs, up_pow2(-180))) {
        detail = "b=" + std::to_string(b) + " d=" + std::to_string(d) +
                 ": not above b*ln(b/2)";
        return false;
      }
      if (!cert_greater_q(r.value, r.error_bound, floor_q)) {
        detail = "b=" + std::to_string(b) + " d=" + std::to_string(d) +
                 ": not above 1.2";
        return false;
      }
      Real m(64);
      mpfr_sub(m.raw(), r.value.raw(), rhs.raw(), MPFR_RNDN);
      worst_margin = std::min(worst_margin, mpfr_get_d(m.raw(), MPFR_RNDN));
    }
  }
  detail = "smallest margin over b*ln(b/2): " + fmt(worst_margin);
  return true;
}

// The transform of the k-occurrence measure at integer n equals the series
// tail over denominators extending the digits of n, with the occurrence
// count raised by the occurrences already inside n.
bool duality_pair(const TruncatedMeasure& mu, u64 n, double& worst,
                  std::string& why) {
  auto s = stieltjes_oracle(mu, n);
  const ProblemSpec& msp = mu.spec();
  const ProblemSpec ssp{msp.b, msp.d, msp.k + count_digit(n, msp.b, msp.d)};
  auto p = prefix_tail(ssp, n, 45);
  if (!cert_within(s.value, s.uncertainty, p.value, p.error_bound)) {
    why = describe(msp) + " n=" + std::to_string(n) +
          ": transform and prefix tail disagree beyond combined bounds";
    return false;
  }
  Real d = diff_upper(s.value, p.value);
  Real allow = up_add(s.uncertainty, p.error_bound);
  if (!allow.is_zero()) {
    worst = std::max(worst, mpfr_get_d(d.raw(), MPFR_RNDN) /
                                mpfr_get_d(allow.raw(), MPFR_RNDN));
  }
  return true;
}

bool body_duality(bool full, std::string& detail) {
  double worst = 0;
  std::string why;
  const unsigned kp_max = full ? 3 : 1;
  const int len_a = full ? 150 : 60;
  const u64 n_max_a = full ? 3 : 2;
  for (unsigned kp = 0; kp <= kp_max; ++kp) {
    auto mu = build_measure({2, 1, kp}, len_a);
    for (u64 n = 1; n <= n_max_a; ++n)
      if (!duality_pair(mu, n, worst, why)) {
        detail = why;
        return false;
      }
  }
  if (full) {
    auto mu = build_measure({10, 9, 0}, 8);
    for (u64 n = 1; n <= 8; ++n)
      if (!duality_pair(mu, n, worst, why)) {
        detail = why;
        return false;
      }
  }
  detail = "worst |diff|/allowance = " + fmt(worst);
  return true;
}

bool body_telescoping(std::string& detail) {
  double worst = 0;
  for (unsigned b : {2u, 10u, 16u}) {
    const mpfr_prec_t p = 280;
    Real lhs(p);
    for (u64 n = 1; n < b; ++n) lhs.add(limit_prefix_value(b, n, p));
    Real rhs = limit_value(b, p);
    Real diff = diff_upper(lhs, rhs);
    Real thr = up_pow2(-240);
    if (!mpfr_lessequal_p(diff.raw(), thr.raw())) {
      detail = "b=" + std::to_string(b) + ": telescoped sum differs from b*ln(b)";
      return false;
    }
    worst = std::max(worst, mpfr_get_d(diff.raw(), MPFR_RNDN));
  }
  detail = "worst |diff| = " + fmt(worst);
  return true;
}

bool body_determinism(const std::vector<SeriesResult>& baseline,
                      const std::vector<ProblemSpec>& specs, long digits,
                      const std::vector<int>& levels, std::string& detail) {
  if (baseline.empty()) {
    detail = "no baseline from the agreement check";
    return false;
  }
  auto rerun = agreement_runs(specs, digits, levels);
  if (rerun.size() != baseline.size()) {
    detail = "run count changed";
    return false;
  }
  for (size_t i = 0; i < rerun.size(); ++i) {
    const auto& a = baseline[i];
    const auto& b = rerun[i];
    if (!mpfr_equal_p(a.value.raw(), b.value.raw()) ||
        !mpfr_equal_p(a.error_bound.raw(), b.error_bound.raw()) ||
        a.terms != b.terms || a.level != b.level ||
        a.achieved != b.achieved) {
      detail = "output " + std::to_string(i) + " not bit-identical";
      return false;
    }
  }
  detail = std::to_string(rerun.size()) + " outputs bit-identical";
  return true;
}

}  // namespace

BatteryReport acceptance_battery(const Progress& progress) {
  BatteryReport rep;
  const std::vector<ProblemSpec> agree_specs{
      {10, 9, 0}, {10, 9, 1}, {10, 0, 2}, {3, 1, 1}, {2, 1, 3}};
  const std::vector<int> agree_levels{1, 2, 3};
  std::vector<SeriesResult> baseline;

  run_check(rep, progress, "degenerate-zero", 1.0, body_degenerate);
  run_check(rep, progress, "binary-one-equals-two", 1000.0, body_two);
  run_check(rep, progress, "variant-level-agreement", 30000.0,
            [&](std::string& d) {
              return body_agreement(agree_specs, 100, agree_levels, &baseline, d);
            });
  run_check(rep, progress, "binary-moment-closed-form", 1000.0,
            [](std::string& d) { return body_moment_closed(60, d); });
  run_check(rep, progress, "hand-recurrence-values", 1.0, body_hand_values);
  run_check(rep, progress, "moment-invariant-battery", 60000.0,
            [](std::string& d) {
              return body_invariants({2u, 3u, 10u, 16u}, 20, 60, d);
            });
  run_check(rep, progress, "measure-moment-agreement", 60000.0,
            [](std::string& d) {
              return body_measure_moments(200, 5, 20, true, d);
            });
  run_check(rep, progress, "interval-mass-flatness", 60000.0, body_flatness);
  run_check(rep, progress, "count-monotonicity", 120000.0, body_monotonicity);
  run_check(rep, progress, "lower-bound-floor", 60000.0, body_floor);
  run_check(rep, progress, "transform-prefix-duality", 60000.0,
            [](std::string& d) { return body_duality(true, d); });
  run_check(rep, progress, "telescoping-limit", 1000.0, body_telescoping);
  run_check(rep, progress, "determinism", 30000.0, [&](std::string& d) {
    return body_determinism(baseline, agree_specs, 100, agree_levels, d);
  });
  return rep;
}

BatteryReport fast_battery(const Progress& progress) {
  BatteryReport rep;
  const std::vector<ProblemSpec> agree_specs{{10, 9, 0}, {2, 1, 3}};
  const std::vector<int> agree_levels{2, 3};
  std::vector<SeriesResult> baseline;

  run_check(rep, progress, "degenerate-zero", 10.0, body_degenerate);
  run_check(rep, progress, "binary-one-equals-two", 1000.0, body_two);
  run_check(rep, progress, "variant-level-agreement", 10000.0,
            [&](std::string& d) {
              return body_agreement(agree_specs, 60, agree_levels, &baseline, d);
            });
  run_check(rep, progress, "binary-moment-closed-form", 1000.0,
            [](std::string& d) { return body_moment_closed(40, d); });
  run_check(rep, progress, "hand-recurrence-values", 10.0, body_hand_values);
  run_check(rep, progress, "moment-invariant-battery", 20000.0,
            [](std::string& d) { return body_invariants({2u, 10u}, 10, 30, d); });
  run_check(rep, progress, "measure-moment-agreement", 20000.0,
            [](std::string& d) {
              return body_measure_moments(80, 3, 12, false, d);
            });
  run_check(rep, progress, "transform-prefix-duality", 20000.0,
            [](std::string& d) { return body_duality(false, d); });
  run_check(rep, progress, "telescoping-limit", 1000.0, body_telescoping);
  run_check(rep, progress, "determinism", 10000.0, [&](std::string& d) {
    return body_determinism(baseline, agree_specs, 60, agree_levels, d);
  });
  return rep;
}

std::string fault_injection_probe() {
  auto t = MomentTable::guarded(MomentKind::u, {10, 9, 3}, 20,
                                moment_working_prec(60, 20));
  mpq_class bogus(37, 10);
  bogus.canonicalize();
  t.corrupt(1, 5, bogus);
  auto rep = check_bounds(t);
  if (rep.ok) return {};
  return rep.first_violation;
}

}  // namespace irwin::checks
