#pragma once
// Twisted-sector geometry.  For a permutation g (or just its orbit
// partition P — conjugate elements with equal orbits share everything), the
// fixed locus M^g is:
//
//   case A:  X^{O(g)}, one component, model = tensor power of the base
//            surface algebra over the orbits (ordered by least element);
//   case B:  the locus {x in A^{N} : sum x_i = 0, x constant on orbits}
//            = disjoint torsion translates indexed by tau in A[d],
//            d = gcd of orbit sizes.  Every component is a torsor under an
//            abelian variety of dimension l-1, and its model is the
//            exterior algebra on Q^{4l} modulo the four weight vectors
//            (lambda_1/d, ..., lambda_l/d) (x) e_j.
//
// Component labels live in (Z/d)^4 (tau <-> the torsion point tau/d
// coordinatewise); they are packed as tau[0] + tau[1] d + tau[2] d^2 +
// tau[3] d^3.  The inclusion M^Q c= M^P (Q coarsening P) carries the
// Q-component tau' into the P-component tau' mod d_P — the rule the
// brute-force torsion oracle validates independently.

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "orbring/algebra.hpp"
#include "orbring/combinatorics.hpp"
#include "orbring/poly.hpp"

namespace orbring {

struct SectorGeometry {
  CaseConfig cfg;
  SetPartition part;        // orbit partition, blocks by least element
  std::vector<int> sizes;   // block sizes, block order (case B weights)
  int l = 0;                // number of blocks
  int d = 1;                // gcd of sizes (case B), 1 in case A
  int dimC = 0;             // complex dimension of (each component of) M^P
  int age = 0;              // N - l, the age of any g with these orbits
  int comp_count = 1;       // d^4 (case B) or 1 (case A)
  Algebra model;            // per-component cohomology model

  // Case B lattice bookkeeping.  Ambient generator (block i, letter j) has
  // index 4*i + j.  The model's degree-1 generators are an integral basis
  // of H^1 of one component (the dual kernel lattice tensored with the four
  // base letters), so the model's top monomial integrates to exactly 1 over
  // the component; proj1 expresses each ambient generator in that basis,
  // and lift1 gives one integral ambient representative per model generator
  // (well-defined up to the weight relation).
  std::vector<SparseVec> proj1;
  std::vector<SparseVec> lift1;

  Poly component_poincare() const {
    auto p = model.poincare();
    return Poly(p.begin(), p.end());
  }
  Poly betti() const {  // whole fixed locus: comp_count * component dims
    Poly p = component_poincare();
    for (auto& c : p) c *= comp_count;
    return p;
  }

  // Component label packing.
  int comp_pack(const std::array<int, 4>& tau) const;
  std::array<int, 4> comp_unpack(int idx) const;
  // Label of the coarser sector's component containing this one (d_coarse
  // divides this->d): reduce each coordinate mod d_coarse.
  int comp_project(int idx, const SectorGeometry& coarse) const;
};

SectorGeometry build_sector(const CaseConfig& cfg, const SetPartition& part);
SectorGeometry build_sector(const CaseConfig& cfg, const Permutation& g);

// Algebra homomorphism between per-component sector models, covering both
// pullbacks along partial-diagonal inclusions (restriction to a coarser
// partition) and the isomorphisms induced by conjugation.  The map acts the
// same way on every matched component pair; component matching is handled
// by the ring layer via comp_project / label preservation.
class SectorHom {
 public:
  // Pullback along M^dst -> M^src, where dst.part coarsens src.part.
  // input_error if it does not coarsen.  Case B: asserts the weight space
  // W_src maps into W_dst (scaled by d_dst/d_src) before quotients.
  static SectorHom restriction(std::shared_ptr<const SectorGeometry> src,
                               std::shared_ptr<const SectorGeometry> dst);
  // Isomorphism H(M^g) -> H(M^{hgh^-1}) induced by x -> h.x (realized as
  // the pullback along h^{-1}).  dst must be the sector of hgh^{-1};
  // component labels are preserved.
  static SectorHom conjugation(std::shared_ptr<const SectorGeometry> src,
                               std::shared_ptr<const SectorGeometry> dst,
                               const Permutation& h);

  const SectorGeometry& src() const { return *src_; }
  const SectorGeometry& dst() const { return *dst_; }

  // Image of a src-model basis monomial; memoized.
  const SparseVec& apply(int deg, int idx) const;
  // Same, without touching the memo table — for one-shot sweeps (traces,
  // orbit sums) where caching every image would only cost memory.
  SparseVec apply_raw(int deg, int idx) const { return compute(deg, idx); }
  // Linear extension within one degree.
  SparseVec apply_vec(int deg, const SparseVec& v) const;

 private:
  std::shared_ptr<const SectorGeometry> src_, dst_;
  // case A: per dst block, the src blocks merged into it (ascending)
  std::vector<std::vector<int>> groups_;
  std::vector<int> group_of_;  // src block -> dst block
  // case B: image of each src model generator in the dst model basis
  std::vector<SparseVec> one_images_;

  SparseVec compute(int deg, int idx) const;
  mutable std::unordered_map<std::uint64_t, SparseVec> memo_;
};

}  // namespace orbring
