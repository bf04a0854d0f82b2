#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <map>
#include <vector>

#include "irwin/digits.hpp"
#include "irwin/real.hpp"

namespace irwin {

// Options for building truncated digit measures.
struct MeasureOptions {
  // Hard ceiling on the number of digit strings a build may enumerate;
  // build_measure refuses larger requests.
  unsigned long enumeration_budget = 100000000;
  // The atom map is materialized only up to this many distinct atoms;
  // larger measures are kept implicit and answer queries through exact
  // closed forms instead of a map.
  unsigned long atom_budget = 2000000;
  // When set, a request past enumeration_budget is built in implicit form
  // instead of being refused.  Exact map-free queries (mass, moments,
  // point masses) remain available at any size; only operations that
  // need enumeration (atom dumps, transform oracles) stay budgeted.
  bool allow_implicit_overflow = false;
};

// Finite truncation of the discrete measure whose atoms sit at the values
// x = 0.s (base b) of the digit strings s containing d exactly k times,
// each string of length l <= max_len carrying weight b^-l.  The full
// measure has total mass b; tail_mass accounts exactly for the lengths
// beyond the truncation.
class TruncatedMeasure {
 public:
  const ProblemSpec& spec() const { return spec_; }
  int max_len() const { return max_len_; }
  bool materialized() const { return materialized_; }
  // Aggregated atom map (value -> weight); throws std::logic_error when the
  // measure is implicit.
  const std::map<mpq_class, mpq_class>& atoms() const;
  const mpq_class& tail_mass() const { return tail_; }
  // Sum of all truncated weights; partial_mass() + tail_mass() == b exactly.
  const mpq_class& partial_mass() const { return partial_; }
  const mpz_class& string_count() const { return strings_; }
  const mpz_class& atom_count() const { return atom_count_; }

 private:
  friend TruncatedMeasure build_measure(const ProblemSpec&, int,
                                        const MeasureOptions&);
  TruncatedMeasure() = default;
  ProblemSpec spec_;
  int max_len_ = 0;
  bool materialized_ = false;
  std::map<mpq_class, mpq_class> atoms_;
  mpq_class tail_;
  mpq_class partial_;
  mpz_class strings_;
  mpz_class atom_count_;
};

TruncatedMeasure build_measure(const ProblemSpec& spec, int max_len,
                               const MeasureOptions& opts = {});

// An exact rational query result together with the truncation slack that
// separates it from the untruncated measure.
struct MassValue {
  mpq_class value;
  mpq_class tail;
};

// Weight of [t, u) with 0 <= t < u <= 1.  Exact in either representation.
MassValue mass(const TruncatedMeasure& mu, const mpq_class& t,
               const mpq_class& u);

// Weight of the open interval (t, u): mass([t,u)) minus the atom at t.
MassValue mass_open(const TruncatedMeasure& mu, const mpq_class& t,
                    const mpq_class& u);

// Weight of the single atom at x (0 when x is not a base-b value of depth
// <= max_len or carries no strings with the right count).
mpq_class point_mass(const TruncatedMeasure& mu, const mpq_class& x);

// Exact integral of x^m (or (1-x)^m with the complementary flag) against
// the truncated measure; tail bounds the missing lengths since the
// integrand is at most 1 on [0,1).
MassValue moment_oracle(const TruncatedMeasure& mu, int m,
                        bool complementary = false);

// All moments at once: result[j][i] = integral of x^i (or (1-x)^i) against
// the truncated measure with count j, for j <= spec.k and i <= max_m,
// computed by an exact integer recursion over digit positions — no
// enumeration, no use of the coefficient recurrences.
std::vector<std::vector<mpq_class>> moment_matrix(const ProblemSpec& spec,
                                                  int max_m, int max_len,
                                                  bool complementary = false);

// Integral of 1/(n + x) against the truncated measure, evaluated
// numerically with a certified envelope.  uncertainty adds the numeric
// envelope and the truncation slack tail_mass/n.  Equivalently this is the
// sum of 1/q over integers q obtained by appending a counted string to the
// base-b digits of n, which is what the series-side prefix computation
// evaluates through an entirely different route.
struct StieltjesValue {
  Real value;
  Real uncertainty;
};
StieltjesValue stieltjes_oracle(const TruncatedMeasure& mu, u64 n,
                                const MeasureOptions& opts = {});

// Self-similarity verification on the depth-l' block [x, x + b^-l'): on a
// mesh of open subintervals the block's mass must equal b^-l' times the
// mass of the count-(k-j') measure of the scaled interval, where j' counts
// d in the depth-l' digit string of x.  Open intervals exclude the
// endpoint atoms, making the identity exact at matching truncations
// (lengths L on the left, L - l' on the right); discrepancies are reported
// exactly and ok requires them all to vanish.  When k < j' the block
// interior must carry no mass at all.
struct ScalingReport {
  bool ok = false;
  int checked = 0;
  mpq_class max_discrepancy;  // largest |lhs - b^-l' * rhs| over the mesh
  unsigned jprime = 0;
  bool empty_case = false;  // k < j': interior masses checked against zero
};
ScalingReport scaling_check(const ProblemSpec& spec, const mpq_class& x,
                            int lprime, int max_len,
                            const MeasureOptions& opts = {});

// CSV dump `x_num,x_den,weight_num,weight_den`, one atom per line in
// increasing position order.  Requires a materialized measure.
void dump_atoms_csv(const TruncatedMeasure& mu, std::ostream& os);

}  // namespace irwin
