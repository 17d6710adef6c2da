#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <numeric>

#include "orbring/algebra.hpp"

using namespace orbring;

namespace {

// Reference product via the generic path, fully expanded over two blocks.
SparseVec slow_mul_vec(const Algebra& a, int da, const SparseVec& va, int db,
                       const SparseVec& vb) {
  SparseVec acc;
  for (const auto& [ia, ca] : va)
    for (const auto& [ib, cb] : vb) sparse_add(acc, a.mul(da, ia, db, ib), ca * cb);
  return acc;
}

std::int64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

TEST_CASE("exterior algebra basics") {
  Algebra e = Algebra::exterior(4);
  CHECK(e.top() == 4);
  CHECK(e.total_dim() == 16);
  for (int d = 0; d <= 4; ++d) CHECK(e.dim(d) == binom(4, d));

  // anticommutativity and nilpotence on generators
  SparseVec x12 = e.mul(1, 0, 1, 1);
  SparseVec x21 = e.mul(1, 1, 1, 0);
  REQUIRE(x12.size() == 1);
  CHECK(x12[0].second == -x21[0].second);
  CHECK(e.mul(1, 0, 1, 0).empty());

  // associativity, exhaustively over all homogeneous monomial triples
  for (int da = 0; da <= 4; ++da)
    for (int ia = 0; ia < e.dim(da); ++ia)
      for (int db = 0; db + da <= 4; ++db)
        for (int ib = 0; ib < e.dim(db); ++ib)
          for (int dc = 0; dc + da + db <= 4; ++dc)
            for (int ic = 0; ic < e.dim(dc); ++ic) {
              SparseVec lhs = slow_mul_vec(e, da + db, e.mul(da, ia, db, ib),
                                           dc, {{ic, Rat(1)}});
              SparseVec rhs = slow_mul_vec(e, da, {{ia, Rat(1)}}, db + dc,
                                           e.mul(db, ib, dc, ic));
              CHECK(sparse_eq(lhs, rhs));
            }

  // tuple <-> index round-trip
  for (int d = 0; d <= 4; ++d)
    for (int i = 0; i < e.dim(d); ++i) {
      auto t = e.exterior_tuple(d, i);
      CHECK(int(t.size()) == d);
      CHECK(std::is_sorted(t.begin(), t.end()));
      CHECK(e.exterior_rank(t) == i);
    }

  // wedge of dependent degree-1 vectors vanishes
  SparseVec v{{0, Rat(1)}, {1, Rat(2)}};
  CHECK(e.wedge({v, v}).empty());
  SparseVec w{{1, Rat(1)}};
  SparseVec vw = e.wedge({v, w});
  CHECK(vw == e.mul(1, 0, 1, 1));  // the x2 component of v dies against w
}

TEST_CASE("exterior naming and labels") {
  Algebra e = Algebra::exterior(3, {"u", "v", "w"});
  CHECK(e.gen_name(0) == "u");
  CHECK(e.label(0, 0) == "1");
  CHECK(e.label(2, e.exterior_rank({0, 2})) == "u^w");
  auto [d, i] = e.parse_label("u^w");
  CHECK(d == 2);
  CHECK(i == e.exterior_rank({0, 2}));
  CHECK(e.parse_label("1") == std::pair<int, int>{0, 0});
  CHECK_THROWS_AS(e.parse_label("z"), input_error);
  CHECK_THROWS_AS(e.parse_label("w^u"), input_error);  // not ascending
}

TEST_CASE("surface algebra: pairing and integration") {
  for (auto betti : {std::array<std::int64_t, 5>{1, 4, 6, 4, 1},
                     std::array<std::int64_t, 5>{1, 0, 22, 0, 1},
                     std::array<std::int64_t, 5>{1, 2, 4, 2, 1}}) {
    Algebra s = Algebra::surface(betti);
    CHECK(s.top() == 4);
    for (int d = 0; d <= 4; ++d) CHECK(s.dim(d) == betti[size_t(d)]);

    // one-dimensional top, integration normalized on it
    CHECK(s.dim(4) == 1);
    CHECK(s.integrate(4, 0) == 1);
    CHECK(s.integrate(0, 0) == 0);

    // monomial duality: <m, dual m> = +-1 and off-diagonal pairings vanish
    for (int d = 0; d <= 4; ++d)
      for (int i = 0; i < s.dim(d); ++i) {
        auto [pi, sign] = s.dual(d, i);
        CHECK((sign == 1 || sign == -1));
        SparseVec prod = s.mul(d, i, 4 - d, pi);
        REQUIRE(prod.size() == 1);
        CHECK(prod[0].second == sign);
        for (int j = 0; j < s.dim(4 - d); ++j) {
          if (j == pi) continue;
          SparseVec off = s.mul(d, i, 4 - d, j);
          Rat val = 0;
          for (const auto& [k, c] : off) val += c * s.integrate(4, k);
          CHECK(val == 0);
        }
      }

    // unit really is a unit
    for (int d = 0; d <= 4; ++d)
      for (int i = 0; i < s.dim(d); ++i)
        CHECK(sparse_eq(s.mul(0, 0, d, i), SparseVec{{i, Rat(1)}}));

    // graded commutativity
    for (int da = 0; da <= 4; ++da)
      for (int ia = 0; ia < s.dim(da); ++ia)
        for (int db = 0; da + db <= 4; ++db)
          for (int ib = 0; ib < s.dim(db); ++ib) {
            SparseVec ab = s.mul(da, ia, db, ib);
            SparseVec ba = s.mul(db, ib, da, ia);
            int sign = (da % 2 && db % 2) ? -1 : 1;
            CHECK(sparse_eq(ab, sparse_scale(ba, Rat(sign))));
          }
  }
}

TEST_CASE("surface algebra is associative") {
  Algebra s = Algebra::surface({1, 4, 6, 4, 1});
  for (int da = 0; da <= 4; ++da)
    for (int ia = 0; ia < s.dim(da); ++ia)
      for (int db = 0; db + da <= 4; ++db)
        for (int ib = 0; ib < s.dim(db); ++ib)
          for (int dc = 0; dc + da + db <= 4; ++dc)
            for (int ic = 0; ic < s.dim(dc); ++ic) {
              SparseVec lhs = slow_mul_vec(s, da + db, s.mul(da, ia, db, ib),
                                           dc, {{ic, Rat(1)}});
              SparseVec rhs = slow_mul_vec(s, da, {{ia, Rat(1)}}, db + dc,
                                           s.mul(db, ib, dc, ic));
              CHECK(sparse_eq(lhs, rhs));
            }
}

TEST_CASE("tensor product with Koszul signs") {
  Algebra t = Algebra::tensor({Algebra::exterior(2), Algebra::exterior(2)});
  CHECK(t.top() == 4);
  CHECK(t.total_dim() == 16);
  CHECK(t.factor_count() == 2);

  // poincare = product of factor polynomials: (1+t)^4 here
  CHECK(t.poincare() == std::vector<std::int64_t>{1, 4, 6, 4, 1});

  // (x (x) 1) * (1 (x) y) = x (x) y with no sign; flipping the order picks
  // up the Koszul sign (-1)^{1*1}
  auto idx = [&](int d0, int i0, int d1, int i1) {
    return t.tensor_index({{d0, i0}, {d1, i1}});
  };
  int x1 = idx(1, 0, 0, 0);  // x (x) 1
  int y1 = idx(0, 0, 1, 0);  // 1 (x) y
  SparseVec xy = t.mul(1, x1, 1, y1);
  SparseVec yx = t.mul(1, y1, 1, x1);
  REQUIRE(xy.size() == 1);
  REQUIRE(yx.size() == 1);
  CHECK(xy[0].first == yx[0].first);
  CHECK(xy[0].second == -yx[0].second);

  // parts <-> index round-trip across all degrees
  for (int d = 0; d <= t.top(); ++d)
    for (int i = 0; i < t.dim(d); ++i) {
      auto parts = t.tensor_parts(d, i);
      REQUIRE(parts.size() == 2);
      CHECK(parts[0].first + parts[1].first == d);
      CHECK(t.tensor_index(parts) == i);
    }

  // duality holds in the tensor as well
  for (int d = 0; d <= t.top(); ++d)
    for (int i = 0; i < t.dim(d); ++i) {
      auto [pi, sign] = t.dual(d, i);
      SparseVec prod = t.mul(d, i, t.top() - d, pi);
      REQUIRE(prod.size() == 1);
      CHECK(prod[0].second == sign);
    }
}

TEST_CASE("mask fast path agrees with the generic product") {
  // tensor of exterior algebras: mask capable
  Algebra t = Algebra::tensor(
      {Algebra::exterior(4), Algebra::exterior(4), Algebra::exterior(2)});
  REQUIRE(t.mask_capable());
  CHECK(t.total_gens() == 10);

  // mask round-trip
  for (int d = 0; d <= t.top(); ++d)
    for (int i = 0; i < t.dim(d); ++i) {
      std::uint64_t m = t.mask_of(d, i);
      CHECK(int(std::popcount(m)) == d);
      CHECK(t.index_of_mask(m) == std::pair<int, int>{d, i});
    }

  // exhaustive mask-vs-generic comparison on every monomial pair
  for (int da = 0; da <= t.top(); ++da)
    for (int ia = 0; ia < t.dim(da); ++ia)
      for (int db = 0; da + db <= t.top(); ++db)
        for (int ib = 0; ib < t.dim(db); ++ib) {
          SparseVec generic = t.mul(da, ia, db, ib);
          SparseVec fast = t.mul_vec(da, {{ia, Rat(1)}}, db, {{ib, Rat(1)}});
          CHECK(sparse_eq(generic, fast));
        }

  // surfaces with b1 > 0 are not exterior, so no mask path there
  Algebra s = Algebra::tensor({Algebra::surface({1, 4, 6, 4, 1})});
  CHECK(!s.mask_capable());

  // crossing parity: merging {1} before {0} crosses once
  CHECK(Algebra::mask_crossing_parity(0b10, 0b01) == 1);
  CHECK(Algebra::mask_crossing_parity(0b01, 0b10) == 0);
}

TEST_CASE("quotient of an exterior algebra by degree-1 relations") {
  // Lambda(a,b,c) / (a+b+c): keep the non-pivot pair
  MatrixQ rel(1, 3);
  rel.at(0, 0) = 1;
  rel.at(0, 1) = 1;
  rel.at(0, 2) = 1;
  QuotientModel q = quotient_exterior(3, rel, {"a", "b", "c"});
  CHECK(q.model.gens() == 2);
  CHECK(q.kept == std::vector<int>{1, 2});
  // a projects to -(b+c)
  CHECK(q.proj1[0] == SparseVec{{0, Rat(-1)}, {1, Rat(-1)}});
  CHECK(q.proj1[1] == SparseVec{{0, Rat(1)}});
  CHECK(q.proj1[2] == SparseVec{{1, Rat(1)}});
  // the relation dies under projection
  SparseVec img;
  for (int i = 0; i < 3; ++i) sparse_add(img, q.proj1[size_t(i)], Rat(1));
  CHECK(img.empty());

  MatrixQ dep(2, 3);
  dep.at(0, 0) = 1;
  dep.at(1, 0) = 2;
  CHECK_THROWS_AS(quotient_exterior(3, dep, {"a", "b", "c"}), input_error);
}
