#pragma once
// Graded-commutative algebra models with exact rational coefficients.
//
// Three constructors cover every cohomology ring this engine touches:
//   * exterior(m): Lambda(Q^m) on degree-1 generators — H*(abelian variety),
//     and components of Kummer-side fixed loci after the weight quotient;
//   * surface(b): a formal 4-dimensional surface algebra with prescribed
//     Betti numbers, unit, volume class and monomial-dual Poincare pairing;
//   * tensor(f1..fl): graded tensor product with Koszul signs — H* of a
//     product of surfaces indexed by orbits.
//
// Every model here has a one-dimensional top degree; integration sends the
// unique top monomial to 1, and the Poincare pairing is monomial-dual:
// each basis monomial pairs against exactly one complementary monomial,
// with sign +-1.  Both facts are asserted at construction/test time and the
// Gysin machinery relies on them.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "orbring/exact_linalg.hpp"

namespace orbring {

class Algebra {
 public:
  enum class Kind { Exterior, Surface, Tensor };

  static Algebra exterior(int gens, std::vector<std::string> gen_names = {});
  static Algebra surface(const std::array<std::int64_t, 5>& betti);
  static Algebra tensor(std::vector<Algebra> factors);

  Kind kind() const { return kind_; }
  int top() const { return top_; }
  int dim(int deg) const;
  std::int64_t total_dim() const;
  std::vector<std::int64_t> poincare() const;  // dims per degree 0..top

  // Product of basis monomials; result lives in degree da+db (empty when the
  // product vanishes or the degree exceeds top).  index errors throw.
  SparseVec mul(int da, int ia, int db, int ib) const;

  // Monomial-dual partner: the unique basis monomial in degree top-deg with
  // <m, dual(m)> = sign (+-1); every other pairing in that degree is 0.
  std::pair<int, int> dual(int deg, int idx) const;

  // Integration functional: 1 on the unique top monomial, 0 elsewhere.
  Rat integrate(int deg, int idx) const;

  std::string label(int deg, int idx) const;
  // Inverse of label(); input_error if the string is not a canonical label.
  std::pair<int, int> parse_label(const std::string& s) const;

  // Exterior only: number of generators and their names.
  int gens() const { return gens_; }
  const std::string& gen_name(int i) const { return gen_names_[i]; }
  // Exterior only: decode a degree-k monomial into its ascending index
  // tuple, and back.  Used by sector maps.
  std::vector<int> exterior_tuple(int deg, int idx) const;
  int exterior_rank(const std::vector<int>& tuple) const;
  // Exterior only: multiply a list of sparse degree-1 vectors (wedge).
  // Returns entries in degree = list size.
  SparseVec wedge(const std::vector<SparseVec>& ones) const;

  // Tensor only.
  int factor_count() const { return int(factors_.size()); }
  const Algebra& factor(int i) const { return factors_[i]; }
  // Decode a tensor monomial into per-factor (degree, index) pairs / back.
  std::vector<std::pair<int, int>> tensor_parts(int deg, int idx) const;
  int tensor_index(const std::vector<std::pair<int, int>>& parts) const;

  // Bitmask fast path.  An exterior algebra (or a tensor product of
  // exterior algebras, which is canonically the exterior algebra on the
  // disjoint union of the generators) with at most 64 generators can encode
  // each basis monomial as a bitmask; products reduce to a disjointness
  // test plus a crossing-parity popcount.  Hot loops (structure-constant
  // sweeps, the cross-case homomorphism check) run on masks; the generic
  // mul() path stays authoritative and the two are compared in tests.
  bool mask_capable() const;
  int total_gens() const;  // generator count across factors
  std::uint64_t mask_of(int deg, int idx) const;
  std::pair<int, int> index_of_mask(std::uint64_t m) const;
  // Parity of |{(i,j) : i in a, j in b, i > j}| — the Koszul sign of
  // merging two ascending monomials.
  static int mask_crossing_parity(std::uint64_t a, std::uint64_t b);

  // Bilinear product of two homogeneous sparse vectors; uses the mask path
  // when available, the generic mul() otherwise.
  SparseVec mul_vec(int da, const SparseVec& va, int db,
                    const SparseVec& vb) const;

 private:
  Kind kind_ = Kind::Exterior;
  int top_ = 0;
  std::vector<std::int64_t> dims_;

  // exterior
  int gens_ = 0;
  std::vector<std::string> gen_names_;

  // surface
  std::array<std::int64_t, 5> betti_{};

  // tensor
  std::vector<Algebra> factors_;
  // per degree: list of compositions (one degree per factor) and the basis
  // offset where each composition's block starts
  std::vector<std::vector<std::vector<int>>> comps_;
  std::vector<std::vector<std::int64_t>> comp_offsets_;

  void finish_tensor_tables();
};

// Quotient of an exterior algebra by independent degree-1 relations:
// Lambda(Q^m)/(relations) realized as the exterior algebra on the non-pivot
// coordinates, together with the projection of each ambient generator.
struct QuotientModel {
  Algebra model;                  // exterior on kept generators
  std::vector<int> kept;          // ambient indices of kept generators
  std::vector<SparseVec> proj1;   // ambient generator -> kept-coordinate image
};
// relations: r x m matrix, rows must be independent (else input_error
// "dependent relations").
QuotientModel quotient_exterior(int ambient_gens, const MatrixQ& relations,
                                const std::vector<std::string>& ambient_names);

}  // namespace orbring
