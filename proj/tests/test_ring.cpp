#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "orbring/oracles.hpp"
#include "orbring/ring.hpp"

using namespace orbring;

namespace {

CaseConfig hilb(int n) {
  CaseConfig c;
  c.kind = CaseKind::HilbA;
  c.n = n;
  return c;
}

CaseConfig kummer(int n) {
  CaseConfig c;
  c.kind = CaseKind::KummerB;
  c.n = n;
  return c;
}

void expect_pass(const CheckResult& r) {
  CAPTURE(r.name);
  CAPTURE(r.details);
  CHECK(r.pass);
}

// integral of the top-degree part over one component of a sector model
Rat model_integral(const Algebra& m, int deg, const SparseVec& v) {
  Rat s = 0;
  if (deg != m.top()) return s;
  for (const auto& [i, c] : v) s += c * m.integrate(deg, i);
  return s;
}

}  // namespace

TEST_CASE("frozen graded data for the small rings") {
  OrbifoldRing k1(kummer(1), true);
  CHECK(k1.basis_size() == 32);
  CHECK(k1.poincare_total() == Poly{1, 4, 22, 4, 1});
  CHECK(k1.poincare_invariant() == Poly{1, 0, 22, 0, 1});  // K3 surface
  CHECK(poly_eval_pm1(k1.poincare_invariant(), true) == 24);

  OrbifoldRing k2(kummer(2), true);
  CHECK(k2.basis_size() == 466);
  CHECK(k2.poincare_total() == Poly{1, 8, 31, 68, 250, 68, 31, 8, 1});
  CHECK(k2.poincare_invariant() == Poly{1, 0, 7, 8, 108, 8, 7, 0, 1});
  CHECK(poly_eval_pm1(k2.poincare_invariant(), true) == 108);

  OrbifoldRing h2(hilb(2), true);
  CHECK(h2.basis_size() == 272);
  CHECK(h2.poincare_invariant() ==
        gottsche_series(h2.config().base_betti, 2)[2]);

  // the coarse degree bucketing of the flat basis must match the series
  for (const OrbifoldRing* r : {&k1, &k2, &h2}) {
    auto buckets = r->ck_grading();
    Poly total = r->poincare_total();
    REQUIRE(buckets.size() >= total.size());
    for (size_t d = 0; d < buckets.size(); ++d)
      CHECK(buckets[d] == (d < total.size() ? total[d] : 0));
  }

  // invariant dims agree between explicit projector, fixed-space basis and
  // trace averaging in every degree of the small rings
  for (const OrbifoldRing* r : {&k1, &h2}) {
    Poly mol = r->invariant_dims_molien();
    for (int d = 0; d < int(mol.size()); ++d) {
      auto blk = r->invariant_block(d, 2048);
      auto rank = r->invariant_dim_projector(d, 2048);
      REQUIRE(blk.has_value());
      REQUIRE(rank.has_value());
      CHECK(std::int64_t(blk->basis.size()) == mol[size_t(d)]);
      CHECK(*rank == mol[size_t(d)]);
    }
  }
}

TEST_CASE("basis bookkeeping round-trips") {
  OrbifoldRing r(kummer(2), false);
  for (std::int64_t f = 0; f < r.basis_size(); ++f) {
    BasisKey k = r.key_of_flat(f);
    CHECK(r.flat_of_key(k) == f);
    std::string spec = print_cycles(r.group_element(k.g)) + ";" +
                       std::to_string(k.comp) + ";" +
                       r.sector(k.g).model.label(k.deg, k.idx);
    CHECK(r.parse_key(spec) == k);
    CHECK(unpack_key(pack_key(k)) == k);
  }
  // flat order sorted by packed key
  for (std::int64_t f = 1; f < r.basis_size(); ++f)
    CHECK(pack_key(r.key_of_flat(f - 1)) < pack_key(r.key_of_flat(f)));

  CHECK_THROWS_AS(r.parse_key("(1 4);0;1"), input_error);
  CHECK_THROWS_AS(r.parse_key("junk"), input_error);
  Permutation foreign{{1, 0, 2, 3}};
  CHECK_THROWS_AS(OrbifoldRing(kummer(1), false).element_index(foreign),
                  input_error);
}

TEST_CASE("resource bounds reject oversized inputs") {
  RingBounds tight;
  tight.max_group_order = 100;
  CHECK_THROWS_AS(OrbifoldRing(hilb(5), false, tight), bound_error);
  RingBounds tiny;
  tiny.max_total_dim = 10;
  CHECK_THROWS_AS(OrbifoldRing(kummer(2), false, tiny), bound_error);
  OrbifoldRing h3(hilb(3), false);
  CHECK_THROWS_AS(h3.structure_constants(1200), bound_error);
}

TEST_CASE("unit, duality, selection rule, degree additivity") {
  for (bool dt : {false, true}) {
    for (CaseConfig cfg : {hilb(2), kummer(1), kummer(2)}) {
      OrbifoldRing r(cfg, dt);
      CAPTURE(cfg.case_name());
      CAPTURE(cfg.n);
      CAPTURE(dt);
      expect_pass(r.check_unit(100000, 300, 11));
      expect_pass(r.check_duality(12));
      expect_pass(r.check_selection_rule());
      expect_pass(r.check_degree_additivity(500, 13));
      CHECK(poly_palindromic(r.poincare_total()));
      CHECK(poly_palindromic(r.poincare_invariant()));
    }
  }

  // the obstructed pairs of S_3 on the kernel: a 3-cycle against itself
  // (the pair joins to the same point locus as the product, so nothing is
  // lost in codimension while the ages still add up)
  OrbifoldRing k2(kummer(2), false);
  int obstructed = 0;
  for (int g = 0; g < k2.group_order(); ++g)
    for (int h = 0; h < k2.group_order(); ++h)
      if (k2.obstruction_rank(g, h) > 0) {
        ++obstructed;
        Permutation pg = k2.group_element(g);
        CHECK(cycle_type(pg).parts == std::vector<int>{3});
        CHECK(k2.group_element(h) == pg);
        CHECK(k2.obstruction_rank(g, h) == 2);
      }
  CHECK(obstructed == 2);
}

TEST_CASE("associativity: exhaustive on every small ring, both twists") {
  for (bool dt : {false, true})
    for (CaseConfig cfg : {hilb(1), hilb(2), kummer(1), kummer(2)}) {
      OrbifoldRing r(cfg, dt);
      CAPTURE(cfg.case_name());
      CAPTURE(cfg.n);
      CAPTURE(dt);
      expect_pass(r.check_associativity_exhaustive(100, 17));
    }
}

TEST_CASE("associativity: sampled on the larger rings") {
  for (bool dt : {false, true}) {
    OrbifoldRing h3(hilb(3), dt);
    expect_pass(h3.check_associativity_random(2500, 19));
    OrbifoldRing k3(kummer(3), dt);
    expect_pass(k3.check_associativity_random(2500, 23));
  }
}

TEST_CASE("group action: ring automorphisms forming a representation") {
  for (CaseConfig cfg : {hilb(2), kummer(2)}) {
    for (bool dt : {false, true}) {
      OrbifoldRing r(cfg, dt);
      expect_pass(r.check_g_equivariance(3000000, 400, 29));
      expect_pass(r.check_g_action_group_hom(300, 31));
    }
  }
}

TEST_CASE("invariant subring: closed, graded-commutative, class-regrouped") {
  for (CaseConfig cfg : {hilb(2), kummer(1), kummer(2)}) {
    OrbifoldRing r(cfg, true);
    expect_pass(r.check_invariant_commutativity(250, 37));
    expect_pass(r.check_invariant_closure(250, 41));
    expect_pass(r.check_class_regrouping());
  }
}

TEST_CASE("pushforward: projection formula and multiplicative pullback") {
  for (CaseConfig cfg : {hilb(2), kummer(2), kummer(3)}) {
    OrbifoldRing r(cfg, false);
    expect_pass(r.check_projection_formula(400, 43));
    expect_pass(r.check_restriction_multiplicative(400, 47));
  }
}

TEST_CASE("discrete-torsion cocycle, exhaustive through degree five") {
  for (CaseKind kind : {CaseKind::HilbA, CaseKind::KummerB}) {
    for (int n = 1; n <= 4; ++n) {
      CaseConfig cfg;
      cfg.kind = kind;
      cfg.n = n;
      if (cfg.group_degree() > 5) continue;
      expect_pass(check_epsilon_cocycle(cfg, 2000000, 0, 53));
    }
  }
}

TEST_CASE("product rules in the two-point symmetric product") {
  // With two points there are two sectors: the untwisted one (model: two
  // surface factors) and the involution sector (model: one surface, the
  // diagonal).  The three shapes of the twisted product are checked exactly
  // and exhaustively.
  OrbifoldRing r(hilb(2), true);
  const int gid = 0;
  const int gt = 1;  // the involution comes right after id in lex order
  REQUIRE(print_cycles(r.group_element(gt)) == "(1 2)");
  const Algebra& big = r.sector(gid).model;    // H(X x X)
  const Algebra& small = r.sector(gt).model;   // H(X), diagonal
  auto rest = [&](int deg, int idx) {  // pullback H(XxX) -> H(X)
    return r
        .restriction_hom(r.partition_id(orbits_of(r.group_element(gid))),
                         r.partition_id(orbits_of(r.group_element(gt))))
        .apply(deg, idx);
  };

  // untwisted x untwisted = the plain cup product
  for (int da = 0; da <= big.top(); ++da)
    for (int ia = 0; ia < big.dim(da); ++ia)
      for (int db = 0; da + db <= big.top(); ++db)
        for (int ib = 0; ib < big.dim(db); ++ib) {
          Element prod =
              r.star_basis({gid, 0, da, ia}, {gid, 0, db, ib});
          SparseVec cup = big.mul(da, ia, db, ib);
          REQUIRE(prod.size() == cup.size());
          for (size_t t = 0; t < cup.size(); ++t) {
            CHECK(prod[t].first ==
                  pack_key({gid, 0, da + db, cup[t].first}));
            CHECK(prod[t].second == cup[t].second);
          }
        }

  // untwisted x twisted = restrict, then cup inside the twisted sector
  for (int da = 0; da <= big.top(); ++da)
    for (int ia = 0; ia < big.dim(da); ++ia)
      for (int db = 0; db <= small.top(); ++db)
        for (int ib = 0; ib < small.dim(db); ++ib) {
          Element prod = r.star_basis({gid, 0, da, ia}, {gt, 0, db, ib});
          SparseVec want =
              small.mul_vec(da, rest(da, ia), db, {{ib, Rat(1)}});
          REQUIRE(prod.size() == want.size());
          for (size_t t = 0; t < want.size(); ++t) {
            CHECK(prod[t].first ==
                  pack_key({gt, 0, da + db, want[t].first}));
            CHECK(prod[t].second == want[t].second);
          }
          // and the product is symmetric in this mixed shape (both classes
          // have untwisted-side even degree or the twist carries the sign)
          Element flip = r.star_basis({gt, 0, db, ib}, {gid, 0, da, ia});
          int sign = (da % 2 && db % 2) ? -1 : 1;
          REQUIRE(flip.size() == prod.size());
          for (size_t t = 0; t < prod.size(); ++t)
            CHECK(flip[t].second == prod[t].second * sign);
        }

  // twisted x twisted with the torsion twist = minus the diagonal
  // pushforward of the cup product; verified against integration on the
  // diagonal via the projection formula, for every triple of test classes
  for (int da = 0; da <= small.top(); ++da)
    for (int ia = 0; ia < small.dim(da); ++ia)
      for (int db = 0; da + db <= small.top(); ++db)
        for (int ib = 0; ib < small.dim(db); ++ib) {
          Element prod = r.star_basis({gt, 0, da, ia}, {gt, 0, db, ib});
          // lands untwisted, in model degree da+db+4 (diagonal has
          // complex codimension 2)
          for (const auto& [key, c] : prod) {
            BasisKey k = unpack_key(key);
            CHECK(k.g == gid);
            CHECK(k.deg == da + db + 4);
          }
          const int dg = big.top() - (da + db + 4);
          if (dg < 0) {
            CHECK(prod.empty());
            continue;
          }
          for (int ig = 0; ig < big.dim(dg); ++ig) {
            // integrate prod * gamma over X x X
            Rat lhs = 0;
            for (const auto& [key, c] : prod) {
              BasisKey k = unpack_key(key);
              lhs += c * model_integral(
                             big, big.top(),
                             big.mul(k.deg, k.idx, dg, ig));
            }
            // integrate -(a cup b cup gamma|_diagonal) over the diagonal
            SparseVec ab = small.mul(da, ia, db, ib);
            Rat rhs = -model_integral(
                small, small.top(),
                small.mul_vec(da + db, ab, dg, rest(dg, ig)));
            CHECK(lhs == rhs);
          }
        }
}

TEST_CASE("the cross-case restriction is a ring homomorphism") {
  expect_pass(restriction_ring_hom_check(1, true, 300, 59, {}));
  expect_pass(restriction_ring_hom_check(1, false, 300, 61, {}));
}

TEST_CASE("structure constants of the kernel quotients are integers") {
  // the sector models use integral lattice bases, so the whole table stays
  // over Z; a denominator here means the normalization broke
  OrbifoldRing k2(kummer(2), true);
  const auto& sc = k2.structure_constants();
  std::int64_t nonzero = 0;
  for (const auto& cell : sc)
    for (const auto& [flat, c] : cell) {
      CHECK(c.get_den() == 1);
      ++nonzero;
    }
  CHECK(nonzero > 1000);  // the table is far from empty
}
