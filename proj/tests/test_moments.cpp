#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

#include "irwin/checks.hpp"
#include "irwin/moments.hpp"
#include "irwin/precision.hpp"

using namespace irwin;

namespace {

// |a - b| <= tol on the raw mpfr values
bool within(const Real& a, const Real& b, const Real& tol) {
  Real diff(std::max(a.prec(), b.prec()) + 8);
  mpfr_sub(diff.raw(), a.raw(), b.raw(), MPFR_RNDA);
  mpfr_abs(diff.raw(), diff.raw(), MPFR_RNDU);
  return mpfr_cmp(diff.raw(), tol.raw()) <= 0;
}

}  // namespace

TEST_CASE("binary closed form: u_1 moments are 2/(2^(m+1)-1)") {
  ProblemSpec spec{2, 1, 1};
  const auto t = MomentTable::exact(MomentKind::u, spec, 60);
  for (int m = 0; m <= 60; ++m) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(m + 1));
    CHECK(t.exact_at(1, m) == mpq_class(2, p - 1));
  }
}

TEST_CASE("hand-computed first moments for base 10, digit 9") {
  ProblemSpec spec{10, 9, 0};
  const auto u = MomentTable::exact(MomentKind::u, spec, 1);
  const auto v = MomentTable::exact(MomentKind::v, spec, 1);
  CHECK(u.exact_at(0, 1) == mpq_class(360, 91));
  CHECK(v.exact_at(0, 1) == mpq_class(550, 91));
}

TEST_CASE("order-zero moments carry the full mass b") {
  for (unsigned b : {2u, 3u, 10u}) {
    ProblemSpec spec{b, b - 1, 2};
    for (MomentKind kind : {MomentKind::u, MomentKind::v}) {
      const auto t = MomentTable::exact(kind, spec, 5);
      for (unsigned j = 0; j <= spec.k; ++j)
        CHECK(t.exact_at(j, 0) == mpq_class(b));
    }
  }
}

TEST_CASE("degenerate binary row: all mass at the origin") {
  ProblemSpec spec{2, 1, 1};
  const auto u = MomentTable::exact(MomentKind::u, spec, 20);
  const auto v = MomentTable::exact(MomentKind::v, spec, 20);
  for (int m = 1; m <= 20; ++m) {
    CHECK(u.exact_at(0, m) == 0);
    CHECK(v.exact_at(0, m) == 2);
  }
}

TEST_CASE("guarded entries stay within their certified envelopes") {
  for (unsigned b : {2u, 10u, 16u}) {
    ProblemSpec spec{b, b / 2, 3};
    const int max_m = 30;
    const auto ex = MomentTable::exact(MomentKind::u, spec, max_m);
    const auto gu = MomentTable::guarded(
        MomentKind::u, spec, max_m, moment_working_prec(40, max_m));
    for (unsigned j = 0; j <= spec.k; ++j)
      for (int m = 0; m <= max_m; ++m) {
        Real ref(gu.working_prec() + 64);
        mpfr_set_q(ref.raw(), ex.exact_at(j, m).get_mpq_t(), MPFR_RNDN);
        CHECK(within(gu.at(j, m), ref, gu.entry_error(j, m)));
      }
  }
}

TEST_CASE("extend grows a guarded table consistently") {
  ProblemSpec spec{10, 9, 2};
  const auto prec = moment_working_prec(30, 40);
  auto grown = MomentTable::guarded(MomentKind::v, spec, 10, prec);
  grown.extend(40);
  const auto fresh = MomentTable::guarded(MomentKind::v, spec, 40, prec);
  for (unsigned j = 0; j <= spec.k; ++j)
    for (int m = 0; m <= 40; ++m)
      CHECK(mpfr_equal_p(grown.at(j, m).raw(), fresh.at(j, m).raw()));
}

TEST_CASE("structural bounds hold on clean tables") {
  for (unsigned b : {2u, 3u, 10u}) {
    for (unsigned d : {0u, b - 1}) {
      ProblemSpec spec{b, d, 4};
      for (MomentKind kind : {MomentKind::u, MomentKind::v}) {
        const auto rep = check_bounds(MomentTable::exact(kind, spec, 25));
        CHECK(rep.ok);
        CHECK(rep.complete);
        CHECK(rep.first_violation.empty());
        CHECK(rep.checked > 0);
      }
    }
  }
}

TEST_CASE("a corrupted entry is flagged by name") {
  ProblemSpec spec{10, 9, 3};
  auto t = MomentTable::guarded(MomentKind::u, spec, 20,
                                moment_working_prec(60, 20));
  REQUIRE(check_bounds(t).ok);
  t.corrupt(1, 5, mpq_class(37, 10));
  const auto rep = check_bounds(t);
  CHECK_FALSE(rep.ok);
  CHECK(rep.first_violation.find("j=1 m=5") != std::string::npos);
}

TEST_CASE("the end-to-end fault probe names the violated bound") {
  const std::string flagged = checks::fault_injection_probe();
  CHECK_FALSE(flagged.empty());
  CHECK(flagged.find("j=1 m=5") != std::string::npos);
}

TEST_CASE("compute_u meets the requested certified precision") {
  ProblemSpec spec{10, 9, 1};
  PrecisionContext ctx;
  ctx.target_digits = 45;
  const auto t = compute_u(spec, 25, ctx);
  Real thr(kBoundPrec);
  mpfr_set_ui(thr.raw(), 10, MPFR_RNDN);
  mpfr_pow_si(thr.raw(), thr.raw(), -45, MPFR_RNDD);
  for (unsigned j = 0; j <= spec.k; ++j)
    for (int m = 0; m <= 25; ++m)
      CHECK(mpfr_cmp(t.entry_error(j, m).raw(), thr.raw()) < 0);
}
