#pragma once
// The orbifold product engine: the G-graded ring
//
//     H(M, G) = (+)_{g in G} H^{* - 2 age(g)}(M^g)
//
// for G a symmetric group acting on a power of a surface (case A) or on the
// sum-zero subvariety of a power of an abelian surface (case B), with the
// product
//
//     a (*) b = gysin( a|_{M^{<g,h>}} . b|_{M^{<g,h>}} )        rank = 0
//             = 0                                               rank > 0
//
// where rank = age(g) + age(h) - age(gh) - codim(M^{<g,h>} in M^{gh}) is
// the virtual rank of the obstruction bundle (trivial in both cases, so the
// product is decided entirely by the rank), optionally twisted by the
// discrete-torsion sign (-1)^{eps(g,h)}, eps = (age g + age h - age gh)/2.
//
// Everything is exact over Q.  Construction is eager for sectors and lazy
// (cached) for maps and structure constants; caches are guarded by a single
// recursive mutex so read queries may run concurrently.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "orbring/combinatorics.hpp"
#include "orbring/poly.hpp"
#include "orbring/sector.hpp"

namespace orbring {

struct RingBounds {
  std::int64_t max_total_dim = 200000;  // sum of sector dims incl. components
  int max_group_order = 720;
};

// Address of a basis element: group element gi (lexicographic one-line
// order), component label comp (packed (Z/d)^4), model degree deg, monomial
// index idx.  Total cohomological degree = deg + 2*age(g).
struct BasisKey {
  int g = 0, comp = 0, deg = 0, idx = 0;
  friend auto operator<=>(const BasisKey&, const BasisKey&) = default;
};

// Packed so that numeric order = (g, deg, comp, idx) lexicographic.
std::uint64_t pack_key(const BasisKey& k);
BasisKey unpack_key(std::uint64_t u);

// Ring element: sorted by packed key, no zero coefficients.
using Element = std::vector<std::pair<std::uint64_t, Rat>>;

void element_add(Element& acc, const Element& v, const Rat& scale);
bool element_eq(const Element& a, const Element& b);

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string details;
};

// Everything star() needs about an ordered pair of group elements.
struct PairInfo {
  int ghi = 0;    // index of g*h
  int jpart = 0;  // partition id of the join <g,h>
  int codim = 0;  // complex codim of M^J in M^{gh}
  int rank = 0;   // virtual obstruction rank (>= 0)
  int eps = 0;    // discrete-torsion exponent
};

class OrbifoldRing {
 public:
  OrbifoldRing(CaseConfig cfg, bool discrete_torsion, RingBounds bounds = {});

  const CaseConfig& config() const { return cfg_; }
  bool discrete_torsion() const { return dt_; }
  const RingBounds& bounds() const { return bounds_; }

  // -- group bookkeeping ---------------------------------------------------
  int group_order() const { return int(group_.size()); }
  const Permutation& group_element(int gi) const { return group_[gi]; }
  int element_index(const Permutation& p) const;  // input_error if foreign
  int age(int gi) const { return sector(gi).age; }
  const SectorGeometry& sector(int gi) const { return *sector_of_g_[gi]; }
  std::shared_ptr<const SectorGeometry> sector_ptr(int gi) const {
    return sector_of_g_[gi];
  }

  const PairInfo& pair_info(int gi, int hi) const;
  int obstruction_rank(int gi, int hi) const { return pair_info(gi, hi).rank; }
  int epsilon(int gi, int hi) const { return pair_info(gi, hi).eps; }

  // -- basis bookkeeping ---------------------------------------------------
  // Within a sector the flat order is (deg, comp, idx); sectors are
  // concatenated in group order.  Packed-key order agrees with flat order.
  std::int64_t basis_size() const { return basis_size_; }
  std::int64_t sector_basis_size(int gi) const;
  std::int64_t sector_flat_offset(int gi) const { return flat_offset_[gi]; }
  BasisKey key_of_flat(std::int64_t flat) const;
  std::int64_t flat_of_key(const BasisKey& k) const;
  int total_degree(const BasisKey& k) const;
  std::string key_label(const BasisKey& k) const;  // "(1 2)[0] e1^e2"
  // Parse "cycles;comp;label" (e.g. "(1 2);0;y2_1^y2_3", "id;0;1").
  BasisKey parse_key(const std::string& s) const;

  // -- products ------------------------------------------------------------
  Element star_basis(const BasisKey& a, const BasisKey& b) const;
  Element star(const Element& a, const Element& b) const;
  Element g_action(int hi, const Element& a) const;
  Element unit() const;
  Element sector_unit(int gi) const;  // sum of component fundamental classes
  int element_total_degree(const Element& a) const;  // -1 if 0, input_error
                                                     // if inhomogeneous

  // -- graded dimensions ---------------------------------------------------
  Poly poincare_total() const;       // sum of shifted sector polynomials
  std::vector<std::int64_t> ck_grading() const;  // bucketed over flat basis
  // Invariant (G-fixed) graded dimensions, via engine conjugation traces
  // averaged over the group (Molien).  Always available.
  Poly invariant_dims_molien() const;
  // Graded trace of g_action(hi) in every total degree.
  Poly graded_trace(int hi) const;
  // Explicit fixed-space basis in one total degree, via the kernel of the
  // stacked (A_gen - I) for two group generators; nullopt when the block
  // exceeds max_block.
  struct InvariantBlock {
    int total_deg = 0;
    std::vector<Element> basis;
    std::vector<std::uint64_t> lead;  // coordinate key owned by each vector
  };
  std::optional<InvariantBlock> invariant_block(int total_deg,
                                                std::int64_t max_block) const;
  // Rank of the explicit averaging projector (1/|G|) sum_h A_h on one
  // total-degree block; nullopt when the block exceeds max_block.
  std::optional<std::int64_t> invariant_dim_projector(
      int total_deg, std::int64_t max_block) const;
  // Best-effort invariant Poincare polynomial: explicit blocks when they fit
  // (cross-checked against the Molien path), trace average otherwise.
  Poly poincare_invariant(std::int64_t max_block = 1024) const;
  // Express an invariant element in an InvariantBlock basis; internal_error
  // if the element is not in the span (used by the closure check).
  std::vector<Rat> coords_in_block(const InvariantBlock& blk,
                                   const Element& v) const;

  // -- selection rule ------------------------------------------------------
  // Per (g,h): the K-theory rule (lambda_{-1} of the dual obstruction
  // bundle: 1 if rank = 0 else 0) against the cohomological one (c_top:
  // same gate) and, when rank = 0, a witness that the product of sector
  // fundamental classes is nonzero.  Also verifies rank symmetry.
  CheckResult check_selection_rule() const;

  // -- property checks (report-valued; never weaken, never skip silently) --
  CheckResult check_associativity_exhaustive(int degree_cut_samples,
                                             std::uint64_t seed) const;
  CheckResult check_associativity_random(int count, std::uint64_t seed) const;
  CheckResult check_unit(std::int64_t max_exhaustive, int samples,
                         std::uint64_t seed) const;
  CheckResult check_g_equivariance(std::int64_t max_exhaustive, int samples,
                                   std::uint64_t seed) const;
  CheckResult check_g_action_group_hom(int samples, std::uint64_t seed) const;
  CheckResult check_invariant_commutativity(int samples,
                                            std::uint64_t seed) const;
  CheckResult check_degree_additivity(int samples, std::uint64_t seed) const;
  CheckResult check_duality(std::uint64_t seed) const;
  CheckResult check_projection_formula(int samples, std::uint64_t seed) const;
  CheckResult check_restriction_multiplicative(int samples,
                                               std::uint64_t seed) const;
  CheckResult check_invariant_closure(int samples, std::uint64_t seed) const;
  // Invariant dims match the conjugacy-class regrouping: per class, the
  // centralizer-invariant dims of one representative sector.
  CheckResult check_class_regrouping() const;

  // Full structure-constant table over flat basis pairs (exhaustive paths
  // and JSON export); bound-guarded.
  const std::vector<std::vector<std::pair<std::int64_t, Rat>>>&
  structure_constants(std::int64_t max_basis = 1200) const;

  // internal plumbing shared with the cross-case homomorphism check
  const SectorHom& restriction_hom(int src_part, int dst_part) const;
  const SectorHom& conjugation_hom(int hi, int gi) const;
  int partition_id(const SetPartition& p) const;  // -1 if unknown
  const SectorGeometry& sector_by_part(int pid) const;
  SparseVec gysin_apply(int jpid, int tpid, int deg, const SparseVec& v) const;

 private:
  CaseConfig cfg_;
  bool dt_;
  RingBounds bounds_;

  std::vector<Permutation> group_;
  std::vector<int> part_of_g_;  // group element -> partition id
  // Sector storage is shared per partition; joins of orbit partitions are
  // registered lazily (they carry restriction targets, not ring summands).
  mutable std::vector<std::shared_ptr<const SectorGeometry>> sectors_;
  std::vector<std::shared_ptr<const SectorGeometry>> sector_of_g_;
  mutable std::map<std::vector<std::vector<int>>, int> part_ids_;
  std::vector<std::int64_t> flat_offset_;  // per group element, + total
  std::int64_t basis_size_ = 0;

  mutable std::recursive_mutex mu_;
  mutable std::map<std::int64_t, PairInfo> pair_cache_;
  mutable std::map<std::pair<int, int>, SectorHom> restr_cache_;
  mutable std::map<std::pair<int, int>, SectorHom> conj_cache_;
  // (jpid, tpid, deg) -> columns (J-model flat idx in deg -> target terms)
  mutable std::map<std::tuple<int, int, int>, std::vector<SparseVec>>
      gysin_cache_;
  mutable std::vector<std::vector<std::pair<std::int64_t, Rat>>> sc_;
  mutable bool sc_built_ = false;
  mutable std::optional<Poly> molien_cache_;
  mutable std::map<std::int64_t, Poly> pinv_cache_;

  int register_partition(const SetPartition& p) const;
  std::vector<int> generator_indices() const;
  void validate_key(const BasisKey& k) const;
  // restriction/multiply/gysin for one model-basis pair; component-free.
  struct PipelineOut {
    int out_deg = 0;
    SparseVec v;  // in the gh-sector model
  };
  PipelineOut pipeline(int gi, int hi, int da, int ia, int db, int ib) const;
  // component multiplicity table for one (a.comp, b.comp) pair
  std::vector<std::pair<int, std::int64_t>> comp_mults(int gi, int hi,
                                                       const PairInfo& pi,
                                                       int ca, int cb) const;
  std::vector<MatrixQ> action_matrices(int total_deg,
                                       const std::vector<int>& his) const;
  std::vector<std::uint64_t> block_keys(int total_deg) const;
  friend CheckResult restriction_ring_hom_check(int, bool, int, std::uint64_t,
                                                const RingBounds&);
};

// eps cocycle identity eps(g1,g2)+eps(g1g2,g3) = eps(g1,g2g3)+eps(g2,g3) and
// integrality of eps on all pairs; needs only ages, no ring build.
// Exhaustive when |G|^3 <= max_exhaustive_triples, else seeded sampling.
CheckResult check_epsilon_cocycle(const CaseConfig& cfg,
                                  std::int64_t max_exhaustive_triples,
                                  int samples, std::uint64_t seed);

// Sector-wise restriction from the case-A ring on n+1 letters to the case-B
// ring with parameter n (same group): flatten the tensor model, project by
// the weight relations, spread diagonally over torsion components.  Verifies
// unit |-> unit and multiplicativity on all basis pairs within the degree
// cut (plus sampled pairs beyond it, which must land on 0 = 0).
CheckResult restriction_ring_hom_check(int n, bool dt, int beyond_samples,
                                       std::uint64_t seed,
                                       const RingBounds& bounds = {});

}  // namespace orbring
