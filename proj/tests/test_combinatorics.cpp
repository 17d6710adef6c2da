#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "orbring/combinatorics.hpp"

using namespace orbring;

TEST_CASE("permutation composition and inverse") {
  // (g o h)(x) = g(h(x)); build (1 2 3) and (1 2) in S_3 and check products.
  Permutation c3{{1, 2, 0}};   // 0->1->2->0, cycle (1 2 3)
  Permutation t{{1, 0, 2}};    // (1 2)
  CHECK(is_permutation(c3));
  CHECK(compose(c3, inverse(c3)) == identity_perm(3));
  CHECK(compose(inverse(c3), c3) == identity_perm(3));
  // c3 o t sends 0 -> t(0)=1 -> c3(1)=2.
  CHECK(compose(c3, t).img == std::vector<int>{2, 1, 0});
  CHECK(compose(t, c3).img == std::vector<int>{0, 2, 1});
  CHECK(compose(c3, compose(c3, c3)) == identity_perm(3));
}

TEST_CASE("cycle notation round-trips") {
  CHECK(print_cycles(identity_perm(4)) == "id");
  CHECK(parse_cycles("id", 4) == identity_perm(4));
  Permutation g = parse_cycles("(1 2)(3 4 5)", 5);
  CHECK(g.img == std::vector<int>{1, 0, 3, 4, 2});
  CHECK(print_cycles(g) == "(1 2)(3 4 5)");
  for (const Permutation& p : all_permutations(4))
    CHECK(parse_cycles(print_cycles(p), 4) == p);

  CHECK_THROWS_AS(parse_cycles("(1 6)", 5), input_error);   // out of range
  CHECK_THROWS_AS(parse_cycles("(1 1)", 5), input_error);   // repeated point
  CHECK_THROWS_AS(parse_cycles("(1 2", 5), input_error);    // unbalanced
  CHECK_THROWS_AS(parse_cycles("nonsense", 5), input_error);
}

TEST_CASE("all_permutations is the lex-ordered group") {
  auto s3 = all_permutations(3);
  REQUIRE(s3.size() == 6);
  CHECK(s3.front() == identity_perm(3));
  CHECK(std::is_sorted(s3.begin(), s3.end()));
  // closure under composition and inverse
  std::set<std::vector<int>> seen;
  for (const auto& p : s3) seen.insert(p.img);
  for (const auto& a : s3)
    for (const auto& b : s3) CHECK(seen.count(compose(a, b).img) == 1);
  CHECK(all_permutations(5).size() == factorial(5));
  CHECK(factorial(6) == 720);
}

TEST_CASE("orbit partitions, joins, coarsening") {
  Permutation g = parse_cycles("(1 2)(3 4 5)", 6);
  SetPartition og = orbits_of(g);
  CHECK(og.size() == 3);
  CHECK(og.blocks == std::vector<std::vector<int>>{{0, 1}, {2, 3, 4}, {5}});
  CHECK(og.block_sizes() == std::vector<int>{2, 3, 1});
  CHECK(og.block_of() == std::vector<int>{0, 0, 1, 1, 1, 2});
  CHECK(og.str() == "{0,1}{2,3,4}{5}");

  Permutation h = parse_cycles("(5 6)", 6);
  SetPartition j = orbit_join(g, h);
  CHECK(j.blocks == std::vector<std::vector<int>>{{0, 1}, {2, 3, 4, 5}});
  CHECK(j == join_partitions(orbits_of(g), orbits_of(h)));
  CHECK(coarsens(j, og));
  CHECK(!coarsens(og, j));
  // join is the finest common coarsening: coarsening both inputs and
  // coarsened by anything that coarsens both
  CHECK(coarsens(j, orbits_of(h)));
  SetPartition whole;
  whole.n = 6;
  whole.blocks = {{0, 1, 2, 3, 4, 5}};
  CHECK(coarsens(whole, j));
}

TEST_CASE("integer partitions and conjugacy classes") {
  Permutation g = parse_cycles("(1 2)(3 4 5)", 6);
  CHECK(cycle_type(g).parts == std::vector<int>{3, 2, 1});
  CHECK(cycle_type(g).str() == "3+2+1");
  CHECK(cycle_type(g).sum() == 6);

  CHECK(partitions_of(5).size() == 7);
  CHECK(partitions_of(6).size() == 11);
  // descending-first-part order, each summing correctly
  for (int n = 1; n <= 7; ++n) {
    auto ps = partitions_of(n);
    for (const auto& p : ps) {
      CHECK(p.sum() == n);
      CHECK(std::is_sorted(p.parts.rbegin(), p.parts.rend()));
    }
    for (size_t i = 1; i < ps.size(); ++i)
      CHECK(ps[i - 1].parts[0] >= ps[i].parts[0]);
  }

  for (int n = 2; n <= 6; ++n) {
    std::uint64_t total = 0;
    for (const ClassData& c : conjugacy_class_data(n)) {
      CHECK(c.class_size * c.centralizer_order == factorial(n));
      total += c.class_size;
    }
    CHECK(total == factorial(n));
  }
}

TEST_CASE("centralizer against the class equation") {
  auto s4 = all_permutations(4);
  for (const Permutation& g : s4) {
    auto cent = centralizer(g, s4);
    // |C(g)| matches the class data for this cycle type
    for (const ClassData& c : conjugacy_class_data(4))
      if (c.type == cycle_type(g)) CHECK(cent.size() == c.centralizer_order);
    for (const Permutation& h : cent)
      CHECK(compose(h, g) == compose(g, h));
  }
}

TEST_CASE("config validation") {
  CaseConfig a;
  a.kind = CaseKind::HilbA;
  a.n = 2;
  CHECK_NOTHROW(a.validate());
  CHECK(a.group_degree() == 2);
  CHECK(a.case_name() == "hilb");
  CHECK(a.abelian_base());

  a.base_betti = {1, 0, 22, 0, 1};  // K3-like surface is fine on this side
  CHECK_NOTHROW(a.validate());
  CHECK(!a.abelian_base());
  a.base_betti = {1, 2, 6, 3, 1};  // not palindromic
  CHECK_THROWS_AS(a.validate(), input_error);
  a.base_betti = {2, 0, 6, 0, 1};  // b0 != 1
  CHECK_THROWS_AS(a.validate(), input_error);
  a.n = 0;
  CHECK_THROWS_AS(a.validate(), input_error);

  CaseConfig b;
  b.kind = CaseKind::KummerB;
  b.n = 2;
  CHECK_NOTHROW(b.validate());
  CHECK(b.group_degree() == 3);
  CHECK(b.case_name() == "kummer");
  b.base_betti = {1, 0, 22, 0, 1};  // kernel construction needs the torus
  CHECK_THROWS_AS(b.validate(), input_error);
}

TEST_CASE("age and fixed-locus dimension") {
  CaseConfig a;
  a.kind = CaseKind::HilbA;
  a.n = 4;
  CHECK(age(a, identity_perm(4)) == 0);
  CHECK(age(a, parse_cycles("(1 2)", 4)) == 1);
  CHECK(age(a, parse_cycles("(1 2 3 4)", 4)) == 3);
  CHECK(age(a, parse_cycles("(1 2)(3 4)", 4)) == 2);
  CHECK(sector_dim(a, 4) == 8);  // untwisted: all of A^4

  CaseConfig b;
  b.kind = CaseKind::KummerB;
  b.n = 3;
  CHECK(age(b, identity_perm(4)) == 0);
  CHECK(age(b, parse_cycles("(1 2 3 4)", 4)) == 3);
  CHECK(sector_dim(b, 4) == 6);  // kernel drops one surface factor
  CHECK(sector_dim(b, 1) == 0);  // N-cycle sectors are points

  // age is a class function and age(g) + age(g^-1) = codim of the fixed locus
  auto s4 = all_permutations(4);
  for (const Permutation& g : s4) {
    CHECK(age(b, g) == age(b, inverse(g)));  // real representation
    for (const Permutation& h : s4)
      CHECK(age(b, compose(h, compose(g, inverse(h)))) == age(b, g));
  }
}

TEST_CASE("discrete-torsion exponent is integral with the right parity") {
  for (CaseKind kind : {CaseKind::HilbA, CaseKind::KummerB}) {
    CaseConfig cfg;
    cfg.kind = kind;
    cfg.n = kind == CaseKind::HilbA ? 4 : 3;
    auto group = all_permutations(cfg.group_degree());
    for (const Permutation& g : group)
      for (const Permutation& h : group) {
        int e = epsilon(cfg, g, h);  // throws internal_error if non-integral
        CHECK(e >= 0);
        CHECK(2 * e == age(cfg, g) + age(cfg, h) - age(cfg, compose(g, h)));
        // unit pairs carry no sign
        if (g == identity_perm(cfg.group_degree())) CHECK(e == 0);
      }
  }
}
