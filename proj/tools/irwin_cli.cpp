#include <mpfr.h>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "irwin/checks.hpp"
#include "irwin/digits.hpp"
#include "irwin/errors.hpp"
#include "irwin/measure.hpp"
#include "irwin/moments.hpp"
#include "irwin/precision.hpp"
#include "irwin/real.hpp"
#include "irwin/series.hpp"

namespace {

using nlohmann::ordered_json;

int parse_level(const std::string& s) {
  return s == "auto" ? 0 : std::stoi(s);
}

irwin::Variant parse_variant(const std::string& s) {
  return s == "pos" ? irwin::Variant::positive : irwin::Variant::alternating;
}

const char* variant_name(irwin::Variant v) {
  return v == irwin::Variant::positive ? "pos" : "alt";
}

struct SumArgs {
  unsigned base = 10, digit = 9, k = 0;
  long digits = 30;
  std::string level = "auto", variant = "alt", format = "plain";
  bool at_most = false;
};

int cmd_sum(const SumArgs& a) {
  irwin::ProblemSpec spec{a.base, a.digit, a.k};
  irwin::SeriesConfig cfg;
  cfg.level = parse_level(a.level);
  cfg.variant = parse_variant(a.variant);
  cfg.at_most = a.at_most;
  irwin::DecimalResult r = irwin::evaluate_decimal(spec, a.digits, cfg);
  const std::string text = r.detail.degenerate_zero ? "0" : r.text;
  if (a.format == "json") {
    ordered_json j;
    j["value"] = text;
    j["error_bound"] = irwin::bound_str(r.detail.error_bound);
    j["base"] = a.base;
    j["digit"] = a.digit;
    j["k"] = a.k;
    j["at_most"] = a.at_most;
    j["level"] = r.detail.level;
    j["variant"] = variant_name(r.detail.variant);
    j["terms"] = r.detail.terms;
    j["elapsed_ms"] = r.detail.elapsed_ms;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << text << "\n";
  }
  if (!r.detail.achieved && !r.detail.degenerate_zero) {
    std::cerr << "warning: certified bound did not reach the requested "
                 "precision (bound "
              << irwin::bound_str(r.detail.error_bound) << ")\n";
    return 3;
  }
  return 0;
}

struct MomentsArgs {
  unsigned base = 10, digit = 9, k = 0;
  int max_m = 20;
  long digits = 30;
  int trunc_len = -1;
  std::string kind = "both";
  bool atoms = false;
};

// tail of the truncated-measure mass for row j: b minus the enumerated part
mpq_class enumeration_tail(unsigned b, unsigned j, int max_len) {
  mpq_class partial = 0;
  mpz_class pw = 1;
  for (int l = 0; l <= max_len; ++l) {
    if (l > 0) pw *= b;
    if (static_cast<int>(j) <= l) {
      mpz_class c, p;
      mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(l), j);
      mpz_ui_pow_ui(p.get_mpz_t(), b - 1, static_cast<unsigned long>(l - j));
      mpq_class t(c * p, pw);
      t.canonicalize();
      partial += t;
    }
  }
  return mpq_class(b) - partial;
}

int cmd_moments(const MomentsArgs& a) {
  irwin::ProblemSpec spec{a.base, a.digit, a.k};
  spec.validate();
  if (a.atoms) {
    if (a.trunc_len < 0)
      throw std::invalid_argument("--atoms requires --trunc-len");
    auto mu = irwin::build_measure(spec, a.trunc_len);
    irwin::dump_atoms_csv(mu, std::cout);
    return 0;
  }
  const bool want_u = a.kind != "v";
  const bool want_v = a.kind != "u";
  std::cout << "kind,b,d,j,m,value,error_bound\n";
  const auto emit_row = [&](const char* kname, unsigned j, int m,
                            const std::string& value,
                            const std::string& err) {
    std::cout << kname << ',' << a.base << ',' << a.digit << ',' << j << ','
              << m << ',' << value << ',' << err << "\n";
  };
  if (a.trunc_len >= 0) {
    // independent enumeration oracle at a finite truncation length
    const mpfr_prec_t p =
        static_cast<mpfr_prec_t>(a.digits * 10 / 3 + 64);
    for (int pass = 0; pass < 2; ++pass) {
      const bool comp = pass == 1;
      if ((comp && !want_v) || (!comp && !want_u)) continue;
      auto mat = irwin::moment_matrix(spec, a.max_m, a.trunc_len, comp);
      for (unsigned j = 0; j <= a.k; ++j) {
        mpq_class tail = enumeration_tail(a.base, j, a.trunc_len);
        irwin::Real tb(irwin::kBoundPrec);
        mpfr_set_q(tb.raw(), tail.get_mpq_t(), MPFR_RNDU);
        for (int m = 0; m <= a.max_m; ++m) {
          irwin::Real v(p);
          mpfr_set_q(v.raw(), mat[j][m].get_mpq_t(), MPFR_RNDN);
          emit_row(comp ? "v" : "u", j, m, irwin::to_fixed(v, a.digits),
                   irwin::bound_str(tb));
        }
      }
    }
    return 0;
  }
  irwin::PrecisionContext ctx;
  ctx.target_digits = a.digits;
  for (int pass = 0; pass < 2; ++pass) {
    const bool comp = pass == 1;
    if ((comp && !want_v) || (!comp && !want_u)) continue;
    irwin::MomentTable t = comp ? irwin::compute_v(spec, a.max_m, ctx)
                                : irwin::compute_u(spec, a.max_m, ctx);
    for (unsigned j = 0; j <= a.k; ++j)
      for (int m = 0; m <= a.max_m; ++m)
        emit_row(comp ? "v" : "u", j, m,
                 irwin::to_fixed(t.at(j, m), a.digits),
                 irwin::bound_str(t.entry_error(j, m)));
  }
  return 0;
}

struct TailArgs {
  unsigned base = 10, digit = 9, k = 0;
  std::uint64_t n = 1;
  long digits = 30;
  std::string variant = "alt", format = "plain";
};

int cmd_tail(const TailArgs& a) {
  irwin::ProblemSpec spec{a.base, a.digit, a.k};
  auto r = irwin::prefix_tail(spec, a.n, a.digits, parse_variant(a.variant));
  const bool ambiguous =
      irwin::rounding_ambiguous(r.value, r.error_bound, a.digits);
  const std::string text = irwin::to_fixed(r.value, a.digits);
  if (a.format == "json") {
    ordered_json j;
    j["value"] = text;
    j["error_bound"] = irwin::bound_str(r.error_bound);
    j["base"] = a.base;
    j["digit"] = a.digit;
    j["k"] = a.k;
    j["n"] = a.n;
    j["variant"] = variant_name(r.variant);
    j["terms"] = r.terms;
    j["elapsed_ms"] = r.elapsed_ms;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << text << "\n";
  }
  if (!r.achieved || ambiguous) {
    std::cerr << "warning: certified bound did not pin all requested digits\n";
    return 3;
  }
  return 0;
}

struct LimitsArgs {
  unsigned base = 10;
  std::uint64_t n = 0;  // 0: the full-series limit b*ln(b)
  long digits = 30;
  std::string format = "plain";
};

int cmd_limits(const LimitsArgs& a) {
  irwin::Real v(64), bound(64);
  for (int attempt = 0; attempt < 6; ++attempt) {
    const mpfr_prec_t w = static_cast<mpfr_prec_t>(
        a.digits * 10 / 3 + 64 + 64 * attempt);
    v = a.n ? irwin::limit_prefix_value(a.base, a.n, w)
            : irwin::limit_value(a.base, w);
    bound = irwin::up_pow2(mpfr_get_exp(v.raw()) + 4 - w);
    if (!irwin::rounding_ambiguous(v, bound, a.digits)) break;
  }
  const std::string text = irwin::to_fixed(v, a.digits);
  if (a.format == "json") {
    ordered_json j;
    j["value"] = text;
    j["error_bound"] = irwin::bound_str(bound);
    j["base"] = a.base;
    if (a.n) j["n"] = a.n;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << text << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& suite) {
  const auto print = [](const irwin::checks::CheckResult& r) {
    std::printf("[%s] %-26s %9.1f ms  %s\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.elapsed_ms, r.detail.c_str());
    std::fflush(stdout);
  };
  irwin::checks::BatteryReport rep = suite == "full"
                                         ? irwin::checks::acceptance_battery(print)
                                         : irwin::checks::fast_battery(print);
  bool all = rep.all_pass;
  if (suite == "full") {
    // a deliberately corrupted table must be flagged by the bounds checker
    std::string flagged = irwin::checks::fault_injection_probe();
    irwin::checks::CheckResult fr;
    fr.name = "fault-detection";
    fr.pass = !flagged.empty();
    fr.detail = fr.pass ? "corrupted entry flagged: " + flagged
                        : "corrupted table went unnoticed";
    print(fr);
    all = all && fr.pass;
  }
  std::printf("%s (%.1f s)\n", all ? "all checks passed" : "FAILURES present",
              rep.total_ms / 1000.0);
  return all ? 0 : 1;
}

struct BenchArgs {
  unsigned base = 10, digit = 9, k = 0;
  std::vector<long> digits;
  std::vector<int> levels;
  std::string variant = "alt";
};

int cmd_bench(const BenchArgs& a) {
  if (a.levels.empty()) {
    std::cerr << "error: --levels requires at least one level in 1..4\n";
    return 2;
  }
  irwin::ProblemSpec spec{a.base, a.digit, a.k};
  spec.validate();
  std::vector<long> ps = a.digits.empty() ? std::vector<long>{100} : a.digits;
  std::cout << "level,P,elapsed_ms,terms\n";
  for (long p : ps) {
    for (int lvl : a.levels) {
      irwin::SeriesConfig cfg;
      cfg.level = lvl;
      cfg.variant = parse_variant(a.variant);
      auto r = irwin::irwin_sum(spec, p, cfg);
      std::printf("%d,%ld,%.3f,%ld\n", r.level, p, r.elapsed_ms, r.terms);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"digit-restricted harmonic series to certified precision"};
  app.require_subcommand(1);

  SumArgs sum_args;
  auto* sum = app.add_subcommand(
      "sum", "sum of 1/n over integers whose base-b expansion contains the "
             "digit exactly k times");
  sum->add_option("--base,-b", sum_args.base, "number base (>= 2)")->required();
  sum->add_option("--digit,-d", sum_args.digit, "restricted digit (0..base-1)")
      ->required();
  sum->add_option("--k,-k", sum_args.k, "required occurrence count")->required();
  sum->add_option("--digits,-P", sum_args.digits,
                  "certified fractional decimal digits");
  sum->add_option("--level", sum_args.level, "digit-length cutoff, or auto")
      ->check(CLI::IsMember({"auto", "1", "2", "3", "4"}));
  sum->add_option("--variant", sum_args.variant,
                  "series form: alternating or positive")
      ->check(CLI::IsMember({"alt", "pos"}));
  sum->add_flag("--at-most", sum_args.at_most,
                "sum over counts 0..k instead of exactly k");
  sum->add_option("--format", sum_args.format, "output format")
      ->check(CLI::IsMember({"plain", "json"}));

  MomentsArgs mom_args;
  auto* mom = app.add_subcommand(
      "moments", "dump the moment tables driving the series, as CSV");
  mom->add_option("--base,-b", mom_args.base, "number base")->required();
  mom->add_option("--digit,-d", mom_args.digit, "restricted digit")->required();
  mom->add_option("--k,-k", mom_args.k, "largest row index")->required();
  mom->add_option("--max-m", mom_args.max_m, "largest moment order")
      ->check(CLI::Range(0, 100000));
  mom->add_option("--digits,-P", mom_args.digits, "printed decimal digits");
  mom->add_option("--trunc-len", mom_args.trunc_len,
                  "use the independent finite-enumeration oracle at this "
                  "truncation length");
  mom->add_option("--kind", mom_args.kind, "which tables to dump")
      ->check(CLI::IsMember({"u", "v", "both"}));
  mom->add_flag("--atoms", mom_args.atoms,
                "dump the truncated measure's atoms instead (needs "
                "--trunc-len, subject to the enumeration budget)");

  TailArgs tail_args;
  auto* tail = app.add_subcommand(
      "tail", "series tail over denominators whose leading digits equal n");
  tail->add_option("--base,-b", tail_args.base, "number base")->required();
  tail->add_option("--digit,-d", tail_args.digit, "restricted digit")
      ->required();
  tail->add_option("--k,-k", tail_args.k, "occurrence count of the full "
                                          "denominators")
      ->required();
  tail->add_option("--n,-n", tail_args.n, "leading-digit prefix (>= 1)")
      ->required();
  tail->add_option("--digits,-P", tail_args.digits,
                   "certified fractional decimal digits");
  tail->add_option("--variant", tail_args.variant, "series form")
      ->check(CLI::IsMember({"alt", "pos"}));
  tail->add_option("--format", tail_args.format, "output format")
      ->check(CLI::IsMember({"plain", "json"}));

  LimitsArgs lim_args;
  auto* lim = app.add_subcommand(
      "limits", "large-count limit b*ln(b), or its per-prefix part "
                "b*ln(1+1/n)");
  lim->add_option("--base,-b", lim_args.base, "number base")->required();
  lim->add_option("--n,-n", lim_args.n, "optional prefix for the per-prefix "
                                        "limit");
  lim->add_option("--digits,-P", lim_args.digits, "printed decimal digits");
  lim->add_option("--format", lim_args.format, "output format")
      ->check(CLI::IsMember({"plain", "json"}));

  std::string suite = "fast";
  auto* ver = app.add_subcommand("verify", "run the self-check battery");
  ver->add_option("suite", suite, "fast (seconds) or full (the complete "
                                  "battery)")
      ->check(CLI::IsMember({"fast", "full"}));

  BenchArgs bench_args;
  auto* ben = app.add_subcommand(
      "bench", "time the series engine across levels and precisions, as CSV");
  ben->add_option("--base,-b", bench_args.base, "number base")->required();
  ben->add_option("--digit,-d", bench_args.digit, "restricted digit")
      ->required();
  ben->add_option("--k,-k", bench_args.k, "occurrence count")->required();
  ben->add_option("--digits,-P", bench_args.digits,
                  "precision targets (repeatable)");
  ben->add_option("--levels", bench_args.levels,
                  "digit-length cutoffs to time (repeatable)")
      ->check(CLI::Range(1, 4));
  ben->add_option("--variant", bench_args.variant, "series form")
      ->check(CLI::IsMember({"alt", "pos"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sum)) return cmd_sum(sum_args);
    if (app.got_subcommand(mom)) return cmd_moments(mom_args);
    if (app.got_subcommand(tail)) return cmd_tail(tail_args);
    if (app.got_subcommand(lim)) return cmd_limits(lim_args);
    if (app.got_subcommand(ver)) return cmd_verify(suite);
    if (app.got_subcommand(ben)) return cmd_bench(bench_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const irwin::PrecisionNotAchieved& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const irwin::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
