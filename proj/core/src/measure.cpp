#include "irwin/measure.hpp"

#include <mpfr.h>

#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irwin/errors.hpp"

namespace irwin {

namespace {

// C(l,k) * (b-1)^(l-k): number of length-l digit strings containing the
// chosen digit exactly k times.
mpz_class strings_of_length(unsigned b, long l, unsigned k) {
  if (l < 0 || static_cast<long>(k) > l) return 0;
  mpz_class c, p;
  mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(l), k);
  mpz_ui_pow_ui(p.get_mpz_t(), b - 1, static_cast<unsigned long>(l - k));
  return c * p;
}

std::vector<mpz_class> base_powers(unsigned b, int up_to) {
  std::vector<mpz_class> p(static_cast<size_t>(up_to) + 1);
  p[0] = 1;
  for (int i = 1; i <= up_to; ++i) p[i] = p[i - 1] * b;
  return p;
}

// Weight collected at one atom: the minimal digit string of length len0
// with c0 occurrences, together with every trailing-zero extension of
// length <= L that still has the required count.
mpq_class atom_weight(const ProblemSpec& spec, int max_len, int len0,
                      unsigned c0, const std::vector<mpz_class>& pb) {
  const unsigned k = spec.k;
  if (spec.d != 0) {
    if (c0 != k) return 0;
    // sum of b^-(len0+i) for i = 0..L-len0
    const int r = max_len - len0;
    mpq_class w(pb[r + 1] - 1, pb[len0] * pb[r] * (spec.b - 1));
    w.canonicalize();
    return w;
  }
  // d == 0: each trailing zero raises the count by one, so exactly one
  // extension length matches.
  if (c0 > k || len0 + static_cast<int>(k - c0) > max_len) return 0;
  mpq_class w(1, pb[len0 + static_cast<int>(k - c0)]);
  w.canonicalize();
  return w;
}

// Occurrences of digit d in the width-`width` base-b representation of v
// (leading zeros included, which matters only for d == 0).
unsigned count_digit_padded(const mpz_class& v, unsigned b, unsigned d,
                            int width) {
  mpz_class n = v;
  unsigned c = 0;
  int len = 0;
  while (n != 0) {
    unsigned long rem = mpz_fdiv_q_ui(n.get_mpz_t(), n.get_mpz_t(), b);
    if (rem == d) ++c;
    ++len;
  }
  if (d == 0 && width > len) c += static_cast<unsigned>(width - len);
  return c;
}

// F[r][j]: total weight b^-|s| of the strings s with |s| <= r containing
// the digit exactly j times (independent of which digit it is).
std::vector<std::vector<mpq_class>> suffix_weight_table(unsigned b, unsigned k,
                                                        int max_len) {
  std::vector<std::vector<mpq_class>> f(
      static_cast<size_t>(max_len) + 1,
      std::vector<mpq_class>(static_cast<size_t>(k) + 1));
  mpq_class pw = 1;
  for (int r = 0; r <= max_len; ++r) {
    if (r > 0) pw /= b;
    for (unsigned j = 0; j <= k; ++j) {
      mpq_class term = strings_of_length(b, r, j);
      term *= pw;
      f[r][j] = (r == 0 ? term : f[r - 1][j] + term);
    }
  }
  return f;
}

// Total weight of the strings of length <= L whose value 0.s is strictly
// below u, with exactly k occurrences.  Exact digit walk along u.
mpq_class weight_below(const ProblemSpec& spec, int max_len,
                       const std::vector<std::vector<mpq_class>>& f,
                       const mpq_class& u) {
  const unsigned b = spec.b, d = spec.d, k = spec.k;
  if (u <= 0) return 0;
  if (u >= 1) return f[max_len][k];
  mpq_class v = 0;
  if (k == 0) v = 1;  // the empty string sits at 0 < u
  mpq_class frac = u, pw = 1;
  unsigned c = 0;
  for (int i = 1; i <= max_len; ++i) {
    pw /= b;
    frac *= b;
    mpz_class dz;
    mpz_fdiv_q(dz.get_mpz_t(), frac.get_num_mpz_t(), frac.get_den_mpz_t());
    frac -= mpq_class(dz);
    const unsigned dig = static_cast<unsigned>(dz.get_ui());
    const bool d_below = d < dig;
    const long ja = static_cast<long>(k) - static_cast<long>(c);
    const unsigned long plain_below = dig - (d_below ? 1 : 0);
    if (ja >= 0 && plain_below > 0) {
      mpq_class t = f[max_len - i][static_cast<unsigned>(ja)];
      t *= static_cast<unsigned long>(plain_below);
      t *= pw;
      v += t;
    }
    if (d_below && ja - 1 >= 0) {
      mpq_class t = f[max_len - i][static_cast<unsigned>(ja - 1)];
      t *= pw;
      v += t;
    }
    if (dig == d) ++c;
    if (c > k) break;
    if (c == k && frac > 0) v += pw;  // the tight prefix itself, x < u
  }
  return v;
}

mpq_class rational_pow(const mpq_class& x, unsigned e) {
  mpq_class r;
  mpz_pow_ui(r.get_num_mpz_t(), x.get_num_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), x.get_den_mpz_t(), e);
  return r;  // already canonical when x is
}

struct AtomEnumerator {
  const ProblemSpec& spec;
  int max_len;
  const std::vector<mpz_class>& pb;
  std::map<mpq_class, mpq_class>* atoms;
  mpz_class num;

  void record(int len, unsigned c) {
    mpq_class w = atom_weight(spec, max_len, len, c, pb);
    if (w == 0) return;
    mpq_class key(num, pb[len]);
    key.canonicalize();
    // depth-first digit order visits values strictly increasingly
    atoms->emplace_hint(atoms->end(), std::move(key), std::move(w));
  }

  void walk(int len, unsigned c) {
    if (len >= max_len) return;
    for (unsigned a = 0; a < spec.b; ++a) {
      const unsigned nc = c + (a == spec.d ? 1 : 0);
      if (nc > spec.k) continue;
      num *= spec.b;
      num += a;
      if (a != 0) record(len + 1, nc);
      walk(len + 1, nc);
      num -= a;
      num /= spec.b;
    }
  }
};

}  // namespace

const std::map<mpq_class, mpq_class>& TruncatedMeasure::atoms() const {
  if (!materialized_)
    throw std::logic_error(
        "atom map not materialized for this measure (implicit form)");
  return atoms_;
}

TruncatedMeasure build_measure(const ProblemSpec& spec, int max_len,
                               const MeasureOptions& opts) {
  spec.validate();
  if (max_len < 0 || max_len > 100000)
    throw std::invalid_argument("truncation length out of range");

  TruncatedMeasure mu;
  mu.spec_ = spec;
  mu.max_len_ = max_len;

  const auto pb = base_powers(spec.b, max_len + 1);
  mpq_class partial = 0;
  for (int l = 0; l <= max_len; ++l) {
    mpq_class t(strings_of_length(spec.b, l, spec.k), pb[l]);
    t.canonicalize();
    partial += t;
    mu.strings_ += strings_of_length(spec.b, l, spec.k);
  }
  mu.partial_ = partial;
  mu.tail_ = mpq_class(spec.b) - partial;

  // Distinct atoms: the empty/origin string plus every counted string that
  // does not end in zero.
  mpz_class ac = atom_weight(spec, max_len, 0, 0, pb) != 0 ? 1 : 0;
  for (int l = 1; l <= max_len; ++l) {
    if (spec.d != 0) {
      if (spec.k >= 1) ac += strings_of_length(spec.b, l - 1, spec.k - 1);
      if (spec.b > 2)
        ac += strings_of_length(spec.b, l - 1, spec.k) * (spec.b - 2);
    } else {
      ac += strings_of_length(spec.b, l - 1, spec.k) * (spec.b - 1);
    }
  }
  mu.atom_count_ = ac;

  const bool over_enum = mpz_cmp_ui(mu.strings_.get_mpz_t(),
                                    opts.enumeration_budget) > 0;
  if (over_enum && !opts.allow_implicit_overflow)
    throw BudgetExceeded("measure enumeration exceeds the configured budget");
  const bool over_atoms =
      mpz_cmp_ui(mu.atom_count_.get_mpz_t(), opts.atom_budget) > 0;
  if (over_enum || over_atoms) {
    mu.materialized_ = false;
    return mu;
  }

  AtomEnumerator en{spec, max_len, pb, &mu.atoms_, mpz_class(0)};
  en.record(0, 0);
  en.walk(0, 0);
  mu.materialized_ = true;
  return mu;
}

MassValue mass(const TruncatedMeasure& mu, const mpq_class& t,
               const mpq_class& u) {
  if (t < 0 || u > 1 || !(t < u))
    throw std::invalid_argument("mass requires 0 <= t < u <= 1");
  MassValue out;
  out.tail = mu.tail_mass();
  if (mu.materialized()) {
    const auto& a = mu.atoms();
    for (auto it = a.lower_bound(t); it != a.end() && it->first < u; ++it)
      out.value += it->second;
    return out;
  }
  const auto f = suffix_weight_table(mu.spec().b, mu.spec().k, mu.max_len());
  out.value = weight_below(mu.spec(), mu.max_len(), f, u) -
              weight_below(mu.spec(), mu.max_len(), f, t);
  return out;
}

mpq_class point_mass(const TruncatedMeasure& mu, const mpq_class& x) {
  if (x < 0 || x >= 1) return 0;
  const ProblemSpec& spec = mu.spec();
  const auto pb = base_powers(spec.b, mu.max_len() + 1);
  int depth = -1;
  for (int e = 0; e <= mu.max_len(); ++e) {
    if (mpz_divisible_p(pb[e].get_mpz_t(), x.get_den_mpz_t())) {
      depth = e;
      break;
    }
  }
  if (depth < 0) return 0;
  mpz_class n0 = x.get_num() * pb[depth] / x.get_den();
  const unsigned c0 = count_digit_padded(n0, spec.b, spec.d, depth);
  return atom_weight(spec, mu.max_len(), depth, c0, pb);
}

MassValue mass_open(const TruncatedMeasure& mu, const mpq_class& t,
                    const mpq_class& u) {
  MassValue out = mass(mu, t, u);
  out.value -= point_mass(mu, t);
  return out;
}

MassValue moment_oracle(const TruncatedMeasure& mu, int m, bool complementary) {
  if (m < 0) throw std::invalid_argument("moment index must be nonnegative");
  MassValue out;
  out.tail = mu.tail_mass();
  if (mu.materialized()) {
    for (const auto& [x, w] : mu.atoms()) {
      mpq_class base = complementary ? mpq_class(1) - x : x;
      out.value += w * rational_pow(base, static_cast<unsigned>(m));
    }
    return out;
  }
  auto mat = moment_matrix(mu.spec(), m, mu.max_len(), complementary);
  out.value = mat[mu.spec().k][m];
  return out;
}

std::vector<std::vector<mpq_class>> moment_matrix(const ProblemSpec& spec,
                                                  int max_m, int max_len,
                                                  bool complementary) {
  spec.validate();
  if (max_m < 0 || max_m > 500)
    throw std::invalid_argument("moment order out of range");
  if (max_len < 0 || max_len > 100000)
    throw std::invalid_argument("truncation length out of range");
  const unsigned b = spec.b, d = spec.d, k = spec.k;
  const int mm = max_m;

  std::vector<std::vector<mpz_class>> binom(
      mm + 1, std::vector<mpz_class>(mm + 1));
  for (int i = 0; i <= mm; ++i)
    for (int j = 0; j <= i; ++j)
      mpz_bin_uiui(binom[i][j].get_mpz_t(), i, j);

  // coef[a][i][i'] = C(i,i') * b^i' * a^(i-i')
  std::vector<mpz_class> bp(mm + 1);
  bp[0] = 1;
  for (int i = 1; i <= mm; ++i) bp[i] = bp[i - 1] * b;
  std::vector<std::vector<std::vector<mpz_class>>> coef(b);
  for (unsigned a = 0; a < b; ++a) {
    coef[a].assign(mm + 1, std::vector<mpz_class>(mm + 1));
    std::vector<mpz_class> ap(mm + 1);
    ap[0] = 1;
    for (int e = 1; e <= mm; ++e) ap[e] = ap[e - 1] * a;
    for (int i = 0; i <= mm; ++i)
      for (int ip = 0; ip <= i; ++ip)
        coef[a][i][ip] = binom[i][ip] * bp[ip] * ap[i - ip];
  }

  // cur[j][i] = sum of value^i over length-l strings with j occurrences,
  // where value is the integer whose base-b digits are the string.
  std::vector<std::vector<mpz_class>> cur(k + 1,
                                          std::vector<mpz_class>(mm + 1)),
      nxt(k + 1, std::vector<mpz_class>(mm + 1));
  cur[0][0] = 1;  // the empty string, value 0 (0^0 = 1)

  std::vector<std::vector<mpq_class>> mom(
      k + 1, std::vector<mpq_class>(mm + 1));
  mom[0][0] += 1;  // length-0 contribution

  mpz_class pbl = 1;  // b^l
  for (int l = 1; l <= max_len; ++l) {
    pbl *= b;
    for (auto& row : nxt)
      for (auto& z : row) z = 0;
    for (unsigned a = 0; a < b; ++a) {
      const unsigned delta = a == d ? 1 : 0;
      for (unsigned j = delta; j <= k; ++j) {
        const auto& src = cur[j - delta];
        auto& dst = nxt[j];
        for (int i = 0; i <= mm; ++i) {
          const auto& ci = coef[a][i];
          for (int ip = 0; ip <= i; ++ip)
            if (src[ip] != 0)
              mpz_addmul(dst[i].get_mpz_t(), ci[ip].get_mpz_t(),
                         src[ip].get_mpz_t());
        }
      }
    }
    cur.swap(nxt);
    // accumulate this length: value^i / b^(l(i+1))
    std::vector<mpz_class> denp(mm + 2);
    denp[0] = 1;
    for (int e = 1; e <= mm + 1; ++e) denp[e] = denp[e - 1] * pbl;
    for (unsigned j = 0; j <= k; ++j)
      for (int i = 0; i <= mm; ++i)
        if (cur[j][i] != 0) {
          mpq_class t(cur[j][i], denp[i + 1]);
          t.canonicalize();
          mom[j][i] += t;
        }
  }

  if (!complementary) return mom;
  std::vector<std::vector<mpq_class>> comp(
      k + 1, std::vector<mpq_class>(mm + 1));
  for (unsigned j = 0; j <= k; ++j)
    for (int m = 0; m <= mm; ++m) {
      mpq_class acc = 0;
      for (int i = 0; i <= m; ++i) {
        mpq_class t(binom[m][i]);
        t *= mom[j][i];
        if (i & 1)
          acc -= t;
        else
          acc += t;
      }
      comp[j][m] = acc;
    }
  return comp;
}

StieltjesValue stieltjes_oracle(const TruncatedMeasure& mu, u64 n,
                                const MeasureOptions& opts) {
  if (n < 1) throw std::invalid_argument("transform point must be positive");
  StieltjesValue out;
  Real tail_over_n(kBoundPrec);
  mpfr_set_q(tail_over_n.raw(), mu.tail_mass().get_mpq_t(), MPFR_RNDU);
  mpfr_div_ui(tail_over_n.raw(), tail_over_n.raw(), n, MPFR_RNDU);

  if (mu.materialized()) {
    const mpfr_prec_t p = 192;
    Real sum(p), nx(p), term(p);
    for (const auto& [x, w] : mu.atoms()) {
      mpfr_set_q(nx.raw(), x.get_mpq_t(), MPFR_RNDN);
      mpfr_add_ui(nx.raw(), nx.raw(), n, MPFR_RNDN);
      mpfr_set_q(term.raw(), w.get_mpq_t(), MPFR_RNDN);
      mpfr_div(term.raw(), term.raw(), nx.raw(), MPFR_RNDN);
      sum.add(term);
    }
    Real env = sum.is_zero()
                   ? Real(kBoundPrec)
                   : up_mul_ui(up_pow2(mpfr_get_exp(sum.raw()) + 3 - p),
                               mu.atoms().size());
    out.value = std::move(sum);
    out.uncertainty = up_add(env, tail_over_n);
    return out;
  }

  if (mpz_cmp_ui(mu.string_count().get_mpz_t(), opts.enumeration_budget) > 0)
    throw BudgetExceeded(
        "transform oracle enumeration exceeds the configured budget");

  const ProblemSpec& spec = mu.spec();
  const int L = mu.max_len();
  // Appending the counted strings to the digits of n yields exactly the
  // integers q whose reciprocals this transform sums.
  mpz_class qmax = (mpz_class(static_cast<unsigned long>(n)) + 1);
  for (int i = 0; i < L; ++i) qmax *= spec.b;
  unsigned long count = 0;
  if (mpz_sizeinbase(qmax.get_mpz_t(), 2) <= 53) {
    double acc = 0.0;
    const auto walk = [&](auto&& self, u64 q, int len, unsigned c) -> void {
      if (c == spec.k) {
        acc += 1.0 / static_cast<double>(q);
        ++count;
      }
      if (len >= L) return;
      for (unsigned a = 0; a < spec.b; ++a) {
        const unsigned nc = c + (a == spec.d ? 1 : 0);
        if (nc > spec.k) continue;
        self(self, q * spec.b + a, len + 1, nc);
      }
    };
    walk(walk, n, 0, 0);
    // Each term is one exact-integer division in double precision and one
    // accumulation into a sum bounded by the total mass; 2^-48 per term
    // overcounts both generously.
    Real sum(64);
    mpfr_set_d(sum.raw(), acc, MPFR_RNDN);
    Real env = up_mul(up_ui(count), up_pow2(-48));
    out.value = std::move(sum);
    out.uncertainty = up_add(env, tail_over_n);
    return out;
  }

  // Values overflow exact doubles: stream with mpfr instead.
  const mpfr_prec_t p = 128;
  Real sum(p), term(p);
  const auto walk = [&](auto&& self, const mpz_class& qq, int len,
                        unsigned c) -> void {
    if (c == spec.k) {
      mpfr_set_z(term.raw(), qq.get_mpz_t(), MPFR_RNDN);
      mpfr_ui_div(term.raw(), 1, term.raw(), MPFR_RNDN);
      sum.add(term);
      ++count;
    }
    if (len >= L) return;
    for (unsigned a = 0; a < spec.b; ++a) {
      const unsigned nc = c + (a == spec.d ? 1 : 0);
      if (nc > spec.k) continue;
      self(self, qq * spec.b + a, len + 1, nc);
    }
  };
  walk(walk, mpz_class(static_cast<unsigned long>(n)), 0, 0);
  Real env = sum.is_zero()
                 ? Real(kBoundPrec)
                 : up_mul_ui(up_pow2(mpfr_get_exp(sum.raw()) + 3 - p), count);
  out.value = std::move(sum);
  out.uncertainty = up_add(env, tail_over_n);
  return out;
}

ScalingReport scaling_check(const ProblemSpec& spec, const mpq_class& x,
                            int lprime, int max_len,
                            const MeasureOptions& opts) {
  spec.validate();
  if (lprime < 1 || lprime > max_len)
    throw std::invalid_argument("block depth must be in 1..max_len");
  if (x < 0 || x >= 1)
    throw std::invalid_argument("block origin must lie in [0,1)");
  const auto pb = base_powers(spec.b, lprime);
  if (!mpz_divisible_p(pb[lprime].get_mpz_t(), x.get_den_mpz_t()))
    throw std::invalid_argument("block origin deeper than the block");

  mpz_class n0 = x.get_num() * pb[lprime] / x.get_den();
  const unsigned jp = count_digit_padded(n0, spec.b, spec.d, lprime);

  ScalingReport rep;
  rep.jprime = jp;
  const mpq_class width(1, pb[lprime]);

  // Mesh of open subintervals, in coordinates relative to the block.
  std::vector<std::pair<mpq_class, mpq_class>> rel;
  rel.emplace_back(0, 1);
  for (unsigned i = 0; i < spec.b; ++i)
    rel.emplace_back(mpq_class(i, spec.b), mpq_class(i + 1, spec.b));
  const unsigned fine = std::min<unsigned>(spec.b * spec.b, 512);
  for (unsigned i = 0; i < fine; ++i) {
    mpq_class lo(i, 1), hi(i + 1, 1);
    lo /= spec.b * spec.b;
    hi /= spec.b * spec.b;
    rel.emplace_back(std::move(lo), std::move(hi));
  }
  for (auto& r : rel) {
    r.first.canonicalize();
    r.second.canonicalize();
  }

  TruncatedMeasure lhs = build_measure(spec, max_len, opts);
  if (spec.k < jp) {
    rep.empty_case = true;
    for (const auto& [t0, u0] : rel) {
      mpq_class t = x + t0 * width, u = x + u0 * width;
      mpq_class m = mass_open(lhs, t, u).value;
      if (m > rep.max_discrepancy) rep.max_discrepancy = m;
      ++rep.checked;
    }
    rep.ok = rep.max_discrepancy == 0;
    return rep;
  }

  TruncatedMeasure rhs = build_measure(
      ProblemSpec{spec.b, spec.d, spec.k - jp}, max_len - lprime, opts);
  for (const auto& [t0, u0] : rel) {
    mpq_class t = x + t0 * width, u = x + u0 * width;
    mpq_class left = mass_open(lhs, t, u).value;
    mpq_class right = mass_open(rhs, t0, u0).value * width;
    mpq_class disc = left - right;
    if (disc < 0) disc = -disc;
    if (disc > rep.max_discrepancy) rep.max_discrepancy = disc;
    ++rep.checked;
  }
  rep.ok = rep.max_discrepancy == 0;
  return rep;
}

void dump_atoms_csv(const TruncatedMeasure& mu, std::ostream& os) {
  for (const auto& [x, w] : mu.atoms())
    os << x.get_num() << ',' << x.get_den() << ',' << w.get_num() << ','
       << w.get_den() << '\n';
}

}  // namespace irwin
