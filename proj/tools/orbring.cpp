// orbring: exact orbifold cohomology rings of symmetric-group quotients.
//
//   build     construct a ring and write its JSON document
//   check     run a named verification suite against independent oracles
//   multiply  star-multiply two basis elements and print the expansion
//   poincare  print graded dimensions (total and invariant)
//
// Exit codes: 0 success / all checks pass, 1 internal inconsistency or
// failed check, 2 bad usage, malformed input, or resource bound exceeded.

#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orbring/json_io.hpp"
#include "orbring/oracles.hpp"
#include "orbring/ring.hpp"

namespace {

using namespace orbring;

struct CommonOpts {
  std::string case_tag = "hilb";
  int n = 1;
  bool dt = false;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> base_betti;
  std::int64_t max_dim = 200000;
  int max_group_order = 720;
  std::string out_path;
};

void add_common_flags(CLI::App* cmd, CommonOpts* o, bool with_output) {
  cmd->add_option("--case", o->case_tag, "quotient family")
      ->required()
      ->check(CLI::IsMember({"hilb", "kummer"}));
  cmd->add_option("-n,--n", o->n, "number of points / kernel parameter")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--dt", o->dt, "twist the product by the discrete-torsion sign");
  cmd->add_option("--seed", o->seed, "seed for sampled property checks");
  cmd->add_option("--base-betti", o->base_betti,
                  "surface Betti numbers b0,b1,b2,b3,b4 (hilb only)")
      ->delimiter(',')
      ->expected(5);
  cmd->add_option("--max-dim", o->max_dim, "total-dimension bound")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-group-order", o->max_group_order,
                  "largest permitted group order")
      ->check(CLI::PositiveNumber);
  if (with_output)
    cmd->add_option("-o,--output", o->out_path, "output JSON path");
}

CaseConfig config_of(const CommonOpts& o) {
  CaseConfig cfg;
  cfg.kind = o.case_tag == "hilb" ? CaseKind::HilbA : CaseKind::KummerB;
  cfg.n = o.n;
  if (!o.base_betti.empty()) {
    if (o.case_tag != "hilb")
      throw input_error("--base-betti applies to --case hilb only");
    for (int i = 0; i < 5; ++i) cfg.base_betti[std::size_t(i)] = o.base_betti[std::size_t(i)];
  }
  cfg.validate();
  return cfg;
}

RingBounds bounds_of(const CommonOpts& o) {
  RingBounds b;
  b.max_total_dim = o.max_dim;
  b.max_group_order = o.max_group_order;
  return b;
}

void print_poly(const char* tag, const Poly& p) {
  std::printf("%-19s %s\n", tag, poly_str(p).c_str());
}

int cmd_build(const CommonOpts& o) {
  if (o.out_path.empty()) throw input_error("build needs -o <path>");
  OrbifoldRing ring(config_of(o), o.dt, bounds_of(o));
  ordered_json doc = ring_document(ring, o.seed, /*with_sc=*/true, {});
  write_document(doc, o.out_path);
  std::printf("wrote %s (basis %lld, %zu sectors)\n", o.out_path.c_str(),
              static_cast<long long>(ring.basis_size()),
              doc["sectors"].size());
  return 0;
}

// One suite = a named list of CheckResults.  Oracle comparisons that are not
// engine methods (Euler, product formula, closed-form traces, torsion
// enumeration) are assembled here.
std::vector<CheckResult> run_suite(const std::string& suite,
                                   const CommonOpts& o) {
  const CaseConfig cfg = config_of(o);
  std::vector<CheckResult> out;
  const bool all = suite == "all";

  if (all || suite == "cocycle") {
    out.push_back(
        check_epsilon_cocycle(cfg, 300000, 20000, o.seed));
  }
  if (suite == "cocycle") return out;  // no ring build needed

  OrbifoldRing ring(cfg, o.dt, bounds_of(o));

  if (all || suite == "associativity") {
    // Exhaustive over every homogeneous basis triple inside the degree cut
    // when the basis is small enough for that to be minutes, sampled
    // otherwise.
    if (ring.basis_size() <= 600)
      out.push_back(ring.check_associativity_exhaustive(200, o.seed));
    else
      out.push_back(ring.check_associativity_random(10000, o.seed));
  }
  if (all || suite == "euler") {
    const std::int64_t lhs = poly_eval_pm1(ring.poincare_invariant(), true);
    const std::int64_t rhs = euler_commuting_pairs(cfg);
    CheckResult r;
    r.name = "euler";
    r.pass = lhs == rhs;
    r.details = "invariant ring at t=-1 gives " + std::to_string(lhs) +
                ", commuting-pair average gives " + std::to_string(rhs);
    out.push_back(std::move(r));
  }
  if (all || suite == "gottsche") {
    if (cfg.kind != CaseKind::HilbA) {
      if (!all) throw input_error("suite gottsche applies to --case hilb only");
    } else {
      const Poly got = gottsche_series(cfg.base_betti, cfg.n)[std::size_t(cfg.n)];
      const Poly inv = ring.poincare_invariant();
      CheckResult r;
      r.name = "gottsche";
      r.pass = poly_trim(got) == poly_trim(inv);
      r.details = "product formula " + poly_str(got) + " vs invariant ring " +
                  poly_str(inv);
      out.push_back(std::move(r));
    }
  }
  if (all || suite == "molien") {
    const Poly engine = ring.invariant_dims_molien();
    const Poly oracle = molien_invariant_poincare(cfg);
    CheckResult r;
    r.name = "molien";
    r.pass = poly_trim(engine) == poly_trim(oracle);
    r.details = "engine traces " + poly_str(engine) +
                " vs closed-form traces " + poly_str(oracle);
    out.push_back(std::move(r));
  }
  if (all || suite == "torsion") {
    if (cfg.kind != CaseKind::KummerB) {
      if (!all) throw input_error("suite torsion applies to --case kummer only");
    } else {
      CheckResult r;
      r.name = "torsion";
      r.pass = true;
      std::int64_t audits = 0;
      const int go = ring.group_order();
      for (int gi = 0; gi < go && r.pass; ++gi)
        for (int hi = 0; hi < go && r.pass; ++hi) {
          TorsionAudit a =
              torsion_bruteforce(cfg.group_degree(), ring.group_element(gi),
                                 ring.group_element(hi));
          ++audits;
          if (!a.counts_ok || !a.labels_ok) {
            r.pass = false;
            r.details = "pair (" + print_cycles(ring.group_element(gi)) +
                        ", " + print_cycles(ring.group_element(hi)) +
                        ") failed the enumeration (counts " +
                        (a.counts_ok ? "ok" : "bad") + ", labels " +
                        (a.labels_ok ? "ok" : "bad") + ")";
          }
        }
      if (r.pass)
        r.details = std::to_string(audits) +
                    " pairs: component counts and residue labels match the "
                    "enumeration";
      out.push_back(std::move(r));
    }
  }
  if (all || suite == "duality") {
    out.push_back(ring.check_duality(o.seed));
  }
  if (all || suite == "restriction") {
    if (cfg.kind != CaseKind::KummerB) {
      if (!all)
        throw input_error(
            "suite restriction compares kummer n to hilb n+1; use --case kummer");
    } else {
      out.push_back(
          restriction_ring_hom_check(cfg.n, o.dt, 400, o.seed, bounds_of(o)));
    }
  }
  return out;
}

int cmd_check(const std::string& suite, const CommonOpts& o) {
  std::vector<CheckResult> results = run_suite(suite, o);
  if (results.empty()) throw input_error("suite ran no checks");
  bool all_pass = true;
  for (const CheckResult& r : results) {
    std::printf("[%s] %s: %s\n", r.pass ? "pass" : "FAIL", r.name.c_str(),
                r.details.c_str());
    all_pass = all_pass && r.pass;
  }
  if (!o.out_path.empty()) {
    // Report document: header + check results, no structure constants.
    OrbifoldRing ring(config_of(o), o.dt, bounds_of(o));
    write_document(ring_document(ring, o.seed, false, results), o.out_path);
    std::printf("wrote %s\n", o.out_path.c_str());
  }
  return all_pass ? 0 : 1;
}

int cmd_multiply(const CommonOpts& o, const std::string& sa,
                 const std::string& sb) {
  OrbifoldRing ring(config_of(o), o.dt, bounds_of(o));
  const BasisKey a = ring.parse_key(sa);
  const BasisKey b = ring.parse_key(sb);
  std::printf("a = %s   (total degree %d)\n", ring.key_label(a).c_str(),
              ring.total_degree(a));
  std::printf("b = %s   (total degree %d)\n", ring.key_label(b).c_str(),
              ring.total_degree(b));
  const PairInfo& pi = ring.pair_info(a.g, b.g);
  const int sign = o.dt && (pi.eps % 2) ? -1 : 1;
  std::printf("sector pair: obstruction rank %d, sign exponent %d%s\n",
              pi.rank, pi.eps,
              o.dt ? (sign < 0 ? ", applied sign -1" : ", applied sign +1")
                   : " (untwisted: sign unused)");
  const Element prod = ring.star_basis(a, b);
  if (prod.empty()) {
    if (pi.rank > 0)
      std::printf("a * b = 0   (obstruction rank %d)\n", pi.rank);
    else
      std::printf("a * b = 0\n");
    return 0;
  }
  std::printf("a * b =\n");
  for (const auto& [key, coeff] : prod)
    std::printf("  %6s  *  %s\n", coeff.get_str().c_str(),
                ring.key_label(unpack_key(key)).c_str());
  return 0;
}

int cmd_poincare(const CommonOpts& o) {
  OrbifoldRing ring(config_of(o), o.dt, bounds_of(o));
  print_poly("total", ring.poincare_total());
  print_poly("invariant", ring.poincare_invariant());
  if (!o.out_path.empty()) {
    write_document(ring_document(ring, o.seed, false, {}), o.out_path);
    std::printf("wrote %s\n", o.out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact orbifold cohomology of symmetric products (hilb) and "
      "generalized Kummer quotients (kummer)"};
  app.require_subcommand(1);

  CommonOpts bo, co, mo, po;
  CLI::App* build = app.add_subcommand("build", "construct a ring, write JSON");
  add_common_flags(build, &bo, true);

  CLI::App* check = app.add_subcommand("check", "run a verification suite");
  std::string suite;
  check
      ->add_option("--suite", suite,
                   "one of associativity, cocycle, euler, gottsche, molien, "
                   "torsion, duality, restriction, all")
      ->required()
      ->check(CLI::IsMember({"associativity", "cocycle", "euler", "gottsche",
                             "molien", "torsion", "duality", "restriction",
                             "all"}));
  add_common_flags(check, &co, true);

  CLI::App* multiply =
      app.add_subcommand("multiply", "star product of two basis elements");
  std::string spec_a, spec_b;
  multiply->add_option("a", spec_a, "element spec \"cycles;component;monomial\"")
      ->required();
  multiply->add_option("b", spec_b, "element spec \"cycles;component;monomial\"")
      ->required();
  add_common_flags(multiply, &mo, false);

  CLI::App* poincare =
      app.add_subcommand("poincare", "graded dimensions of the ring");
  add_common_flags(poincare, &po, true);

  try {
    app.parse(argc, argv);
    if (build->parsed()) return cmd_build(bo);
    if (check->parsed()) return cmd_check(suite, co);
    if (multiply->parsed()) return cmd_multiply(mo, spec_a, spec_b);
    if (poincare->parsed()) return cmd_poincare(po);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const input_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const bound_error& e) {
    std::fprintf(stderr, "bound exceeded: %s\n", e.what());
    return 2;
  } catch (const internal_error& e) {
    std::fprintf(stderr, "internal inconsistency: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return 1;
  }
}
