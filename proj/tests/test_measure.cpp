#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <gmpxx.h>
#include <mpfr.h>

#include <map>
#include <sstream>
#include <stdexcept>

#include "irwin/errors.hpp"
#include "irwin/measure.hpp"
#include "irwin/moments.hpp"
#include "irwin/series.hpp"

using namespace irwin;

namespace {

MeasureOptions implicit_forced() {
  MeasureOptions o;
  o.atom_budget = 0;  // keep even tiny measures in closed-form representation
  return o;
}

}  // namespace

TEST_CASE("binary depth-3 atoms match the hand enumeration") {
  // strings with exactly one 1 up to length 3, grouped by value 0.s:
  // value 1/2: "1", "10", "100" (weights 1/2+1/4+1/8 = 7/8)
  // value 1/4: "01", "010"      (weights 1/4+1/8    = 3/8)
  // value 1/8: "001"            (weight 1/8)
  const auto mu = build_measure(ProblemSpec{2, 1, 1}, 3);
  REQUIRE(mu.materialized());
  const std::map<mpq_class, mpq_class> expect = {
      {mpq_class(1, 8), mpq_class(1, 8)},
      {mpq_class(1, 4), mpq_class(3, 8)},
      {mpq_class(1, 2), mpq_class(7, 8)}};
  CHECK(mu.atoms() == expect);

  std::ostringstream os;
  dump_atoms_csv(mu, os);
  CHECK(os.str() == "1,8,1,8\n1,4,3,8\n1,2,7,8\n");
}

TEST_CASE("zero-count binary measure concentrates at the origin") {
  const auto mu = build_measure(ProblemSpec{2, 1, 0}, 10);
  REQUIRE(mu.atoms().size() == 1);
  // lengths 0..10 of the all-zero string, each of weight 2^-l
  CHECK(mu.atoms().at(0) == mpq_class(2047, 1024));
  CHECK(mu.partial_mass() + mu.tail_mass() == 2);
}

TEST_CASE("restricted digit zero puts exactly 1/b at the origin") {
  const auto mu = build_measure(ProblemSpec{10, 0, 1}, 6);
  CHECK(point_mass(mu, 0) == mpq_class(1, 10));
}

TEST_CASE("partial mass and tail always close up to the full mass b") {
  for (const ProblemSpec spec : {ProblemSpec{2, 1, 2}, ProblemSpec{3, 0, 1},
                                 ProblemSpec{10, 9, 0}}) {
    for (int L : {0, 1, 5}) {
      const auto mu = build_measure(spec, L);
      CHECK(mu.partial_mass() + mu.tail_mass() == spec.b);
      const auto whole = mass(mu, 0, 1);
      CHECK(whole.value == mu.partial_mass());
      CHECK(whole.tail == mu.tail_mass());
    }
  }
}

TEST_CASE("interval masses are additive and monotone") {
  const auto mu = build_measure(ProblemSpec{3, 1, 1}, 7);
  const mpq_class t(0), m1(1, 3), m2(2, 3), u(1);
  const auto a = mass(mu, t, m1).value;
  const auto b = mass(mu, m1, m2).value;
  const auto c = mass(mu, m2, u).value;
  CHECK(a + b + c == mu.partial_mass());
  CHECK(mass(mu, t, m2).value == a + b);
  // open intervals drop exactly the left endpoint atom
  CHECK(mass_open(mu, m1, m2).value == b - point_mass(mu, m1));
}

TEST_CASE("implicit and materialized representations answer identically") {
  for (const ProblemSpec spec : {ProblemSpec{2, 1, 2}, ProblemSpec{10, 9, 1}}) {
    const auto mat = build_measure(spec, 6);
    const auto imp = build_measure(spec, 6, implicit_forced());
    REQUIRE(mat.materialized());
    REQUIRE_FALSE(imp.materialized());
    CHECK_THROWS_AS(imp.atoms(), std::logic_error);
    CHECK(mat.partial_mass() == imp.partial_mass());
    CHECK(mat.tail_mass() == imp.tail_mass());
    for (int i = 0; i < 12; ++i) {
      const mpq_class t(i, 12), u(i + 1, 12);
      CHECK(mass(mat, t, u).value == mass(imp, t, u).value);
      CHECK(point_mass(mat, t) == point_mass(imp, t));
    }
    for (int m = 0; m <= 6; ++m) {
      CHECK(moment_oracle(mat, m).value == moment_oracle(imp, m).value);
      CHECK(moment_oracle(mat, m, true).value ==
            moment_oracle(imp, m, true).value);
    }
  }
}

TEST_CASE("the digit-position recursion equals per-measure integration") {
  ProblemSpec spec{3, 2, 2};
  const int L = 12, M = 8;
  const auto rows = moment_matrix(spec, M, L);
  const auto comp = moment_matrix(spec, M, L, true);
  REQUIRE(rows.size() == spec.k + 1);
  for (unsigned j = 0; j <= spec.k; ++j) {
    const auto mu = build_measure(ProblemSpec{spec.b, spec.d, j}, L);
    for (int m = 0; m <= M; ++m) {
      CHECK(rows[j][m] == moment_oracle(mu, m).value);
      CHECK(comp[j][m] == moment_oracle(mu, m, true).value);
    }
  }
}

TEST_CASE("truncated moments approach the recurrence tables from below") {
  ProblemSpec spec{2, 1, 3};
  const int L = 120, M = 12;
  const auto rows = moment_matrix(spec, M, L);
  const auto u = MomentTable::exact(MomentKind::u, spec, M);
  for (unsigned j = 0; j <= spec.k; ++j) {
    const mpq_class tail =
        build_measure(ProblemSpec{spec.b, spec.d, j}, L, implicit_forced())
            .tail_mass();
    for (int m = 0; m <= M; ++m) {
      const mpq_class gap = u.exact_at(j, m) - rows[j][m];
      CHECK(gap >= 0);
      CHECK(gap <= tail);
    }
  }
}

TEST_CASE("block self-similarity holds exactly at matching truncations") {
  // depth-2 decimal block [0.35, 0.36): prefix "35" contains no 9
  auto r = scaling_check(ProblemSpec{10, 9, 1}, mpq_class(35, 100), 2, 6);
  CHECK(r.ok);
  CHECK(r.jprime == 0);
  CHECK_FALSE(r.empty_case);
  CHECK(r.max_discrepancy == 0);

  // binary block [0.11, 1.0): both digits are 1s, so j' = 2
  r = scaling_check(ProblemSpec{2, 1, 2}, mpq_class(3, 4), 2, 8);
  CHECK(r.ok);
  CHECK(r.jprime == 2);

  // more 1s in the prefix than the count allows: interior must be empty
  r = scaling_check(ProblemSpec{2, 1, 1}, mpq_class(3, 4), 2, 8);
  CHECK(r.ok);
  CHECK(r.empty_case);
}

TEST_CASE("transform oracle agrees with the series computed the other way") {
  ProblemSpec spec{2, 1, 1};
  const auto mu = build_measure(spec, 60);
  for (u64 n : {1, 2, 3}) {
    const auto got = stieltjes_oracle(mu, n);
    // appending strings with one 1 to n: total count rises by count in n
    ProblemSpec dual{2, 1, 1 + count_digit(n, 2, 1)};
    const auto ref = prefix_tail(dual, n, 40);
    Real tol = up_add(got.uncertainty, ref.error_bound);
    Real diff(up_add(got.value, ref.value).prec() + 64);
    mpfr_sub(diff.raw(), got.value.raw(), ref.value.raw(), MPFR_RNDA);
    mpfr_abs(diff.raw(), diff.raw(), MPFR_RNDU);
    CHECK(mpfr_cmp(diff.raw(), tol.raw()) <= 0);
  }
}

TEST_CASE("enumeration budgets are enforced and overridable") {
  ProblemSpec spec{10, 9, 0};
  CHECK_THROWS_AS(build_measure(spec, 14), BudgetExceeded);
  MeasureOptions relaxed;
  relaxed.allow_implicit_overflow = true;
  const auto mu = build_measure(spec, 14, relaxed);
  CHECK_FALSE(mu.materialized());
  CHECK(mu.partial_mass() + mu.tail_mass() == 10);
  // closed-form queries still work at any size
  CHECK(point_mass(mu, mpq_class(1, 10)) > 0);
  // but enumerating operations stay budgeted
  CHECK_THROWS_AS(stieltjes_oracle(mu, 1, relaxed), BudgetExceeded);
}

TEST_CASE("invalid queries are rejected") {
  const auto mu = build_measure(ProblemSpec{2, 1, 1}, 4);
  CHECK_THROWS_AS(mass(mu, mpq_class(1, 2), mpq_class(1, 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(mass(mu, mpq_class(-1, 2), mpq_class(1, 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_measure(ProblemSpec{2, 1, 1}, -1),
                  std::invalid_argument);
  CHECK_THROWS_AS(stieltjes_oracle(mu, 0), std::invalid_argument);
}
