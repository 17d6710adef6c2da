#pragma once
// Independent cross-check computations.  Everything here is derived from
// combinatorics and classical formulas only — no sector models, no star
// product — so these act as oracles for the ring engine:
//
//   * euler_commuting_pairs: orbifold Euler characteristic as the averaged
//     count over commuting pairs of the Euler characteristic of the common
//     fixed locus;
//   * gottsche_series: the product formula for Poincare polynomials of
//     Hilbert schemes of points on a surface;
//   * molien_*: invariant dimensions via averaged graded traces, computed
//     from closed-form trace identities (cycle products for tensor powers,
//     characteristic polynomials for exterior quotients);
//   * torsion_bruteforce: finite-torsion enumeration validating the
//     component bookkeeping of Kummer-side fixed loci.

#include <cstdint>
#include <vector>

#include "orbring/combinatorics.hpp"
#include "orbring/poly.hpp"

namespace orbring {

// chi_orb = (1/|G|) sum over commuting pairs of chi(M^<g,h>).
// Case A: chi(X)^{|J|} (0 for the abelian default).  Case B: (n+1)^4 when
// <g,h> acts transitively, else 0.
std::int64_t euler_commuting_pairs(const CaseConfig& cfg);

// Poincare polynomials of X^[0..n_max] for a surface with given Betti
// numbers, via the product formula
//   sum_n P(X^[n]) z^n =
//     prod_{m>=1} (1+t^{2m-1}z^m)^{b1} (1+t^{2m+1}z^m)^{b3}
//       / [(1-t^{2m-2}z^m)^{b0} (1-t^{2m}z^m)^{b2} (1-t^{2m+2}z^m)^{b4}].
std::vector<Poly> gottsche_series(const std::array<std::int64_t, 5>& betti,
                                  int n_max);

// Generic trace averaging: dims(t) = (1/order) * sum of graded traces.
// Throws internal_error unless every coefficient is a nonnegative integer.
Poly molien_dims(const std::vector<Poly>& traces, std::uint64_t order);

// Graded trace of h acting on the sector of g (summed over components for
// case B), including the t^{2 age(g)} shift.  Closed-form routes:
//   case A: product over cycles of h on the orbit set of g of P_X(+-t^r);
//   case B: d^4 * det(I + t * pibar)^4 with pibar the permutation action on
//           Q^l modulo the weight vector.
// h must centralize g.
Poly sector_trace_formula(const CaseConfig& cfg, const Permutation& g,
                          const Permutation& h);

// Invariant Poincare polynomial by averaging sector_trace_formula over all
// commuting pairs.
Poly molien_invariant_poincare(const CaseConfig& cfg);

// Brute-force torsion audit for one pair (case B).  Enumerates L-torsion
// points (L = lcm(d_g, d_J), capped) of the weighted-sum kernels, per
// H^1-letter, and checks:
//   * labels hit each residue of Z/d with equal multiplicity
//     => component count d^4;
//   * the inclusion M^J c= M^g sends the J-component labeled tau' into the
//     g-component labeled (d_J/d_g) * tau'  (integer form: tau' mod d_g).
// Also runs the full four-letter enumeration when small enough.
struct TorsionAudit {
  std::int64_t g_components = 0;  // d_g^4
  std::int64_t j_components = 0;  // d_J^4
  bool counts_ok = false;
  bool labels_ok = false;
};
TorsionAudit torsion_bruteforce(int group_degree, const Permutation& g,
                                const Permutation& h, int cap = 12);

}  // namespace orbring
