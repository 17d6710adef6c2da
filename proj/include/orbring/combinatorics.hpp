#pragma once
// Symmetric-group combinatorics: permutations (0-indexed one-line form),
// cycle notation (1-indexed for I/O), orbit partitions and joins, integer
// partitions, conjugacy-class data, and the two geometric age functions.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "orbring/exact_linalg.hpp"

namespace orbring {

struct Permutation {
  std::vector<int> img;  // img[i] = image of i

  int degree() const { return int(img.size()); }
  bool operator==(const Permutation& o) const = default;
  auto operator<=>(const Permutation& o) const = default;
};

Permutation identity_perm(int n);
bool is_permutation(const Permutation& g);
// (g o h)(x) = g(h(x)): h acts first.
Permutation compose(const Permutation& g, const Permutation& h);
Permutation inverse(const Permutation& g);

// Cycle notation: 1-indexed, fixed points omitted, identity prints "id".
std::string print_cycles(const Permutation& g);
Permutation parse_cycles(const std::string& s, int n);  // input_error on junk

// Set partition of {0..n-1}: blocks sorted ascending, ordered by least
// element.  This ordering is the orbit numbering used everywhere.
struct SetPartition {
  std::vector<std::vector<int>> blocks;

  int n = 0;
  int size() const { return int(blocks.size()); }
  std::vector<int> block_sizes() const;
  std::vector<int> block_of() const;  // element -> block index
  bool operator==(const SetPartition& o) const = default;
  auto operator<=>(const SetPartition& o) const = default;
  std::string str() const;  // "{0,1}{2}" (0-indexed; diagnostics only)
};

SetPartition orbits_of(const Permutation& g);
SetPartition orbit_join(const Permutation& g, const Permutation& h);
SetPartition join_partitions(const SetPartition& a, const SetPartition& b);
// True when every block of fine sits inside one block of coarse.
bool coarsens(const SetPartition& coarse, const SetPartition& fine);

// Integer partition, parts weakly decreasing.
struct Partition {
  std::vector<int> parts;
  int sum() const;
  bool operator==(const Partition& o) const = default;
  auto operator<=>(const Partition& o) const = default;
  std::string str() const;  // "3+1+1"
};

Partition cycle_type(const Permutation& g);  // includes fixed points
std::vector<Partition> partitions_of(int n); // first-part-descending order

struct ClassData {
  Partition type;
  std::uint64_t class_size = 0;
  std::uint64_t centralizer_order = 0;
};
// One entry per conjugacy class of S_n; class_size * centralizer_order = n!.
std::vector<ClassData> conjugacy_class_data(int n);

std::uint64_t factorial(int n);
std::vector<Permutation> all_permutations(int n);  // lexicographic one-line
std::vector<Permutation> centralizer(const Permutation& g,
                                     const std::vector<Permutation>& group);

// ---------------------------------------------------------------------------
// The two families of global quotients both live on powers of an abelian
// surface A: case A is S_n acting on A^n (Hilbert scheme side), case B is
// S_{n+1} acting on the kernel A_0^{n+1} of the sum map A^{n+1} -> A
// (generalized Kummer side).
enum class CaseKind { HilbA, KummerB };

struct CaseConfig {
  CaseKind kind = CaseKind::HilbA;
  int n = 1;
  // Base-surface Betti numbers, case A only.  Default: abelian surface.
  // (1,0,22,0,1) would be a K3-like surface; the trivial-canonical-class
  // assumption keeps all obstruction bundles trivial.
  std::array<std::int64_t, 5> base_betti{1, 4, 6, 4, 1};

  int group_degree() const { return kind == CaseKind::HilbA ? n : n + 1; }
  bool abelian_base() const {
    return base_betti == std::array<std::int64_t, 5>{1, 4, 6, 4, 1};
  }
  void validate() const;  // input_error on bad n / Betti vector
  std::string case_name() const { return kind == CaseKind::HilbA ? "hilb" : "kummer"; }
};

// age(g) = N - |O(g)| in both cases (N = group degree): for case A this is
// (dim_C A / 2) * (n - |O(g)|) with dim_C A = 2; for case B the same count
// comes from the weighted-sum description of the fixed loci.
int age(const CaseConfig& cfg, const Permutation& g);
// Complex dimension of the fixed locus M^g (partition form: any g with these
// orbits).  Case A: 2*l.  Case B: 2*(l-1).
int sector_dim(const CaseConfig& cfg, int orbit_count);
// Discrete-torsion exponent eps(g,h) = (age g + age h - age gh)/2; always an
// integer here (sign character parity); internal_error otherwise.
int epsilon(const CaseConfig& cfg, const Permutation& g, const Permutation& h);

}  // namespace orbring
