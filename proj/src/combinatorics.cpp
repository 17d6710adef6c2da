#include "orbring/combinatorics.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace orbring {

Permutation identity_perm(int n) {
  Permutation g;
  g.img.resize(n);
  std::iota(g.img.begin(), g.img.end(), 0);
  return g;
}

bool is_permutation(const Permutation& g) {
  std::vector<bool> seen(g.img.size(), false);
  for (int v : g.img) {
    if (v < 0 || v >= g.degree() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation compose(const Permutation& g, const Permutation& h) {
  ORB_CHECK(g.degree() == h.degree(), "compose: degree mismatch");
  Permutation r;
  r.img.resize(g.degree());
  for (int i = 0; i < g.degree(); ++i) r.img[i] = g.img[h.img[i]];
  return r;
}

Permutation inverse(const Permutation& g) {
  Permutation r;
  r.img.resize(g.degree());
  for (int i = 0; i < g.degree(); ++i) r.img[g.img[i]] = i;
  return r;
}

std::string print_cycles(const Permutation& g) {
  std::string out;
  std::vector<bool> seen(g.degree(), false);
  for (int i = 0; i < g.degree(); ++i) {
    if (seen[i] || g.img[i] == i) continue;
    out += "(";
    int j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = true;
      if (!first) out += " ";
      out += std::to_string(j + 1);
      first = false;
      j = g.img[j];
    }
    out += ")";
  }
  return out.empty() ? "id" : out;
}

Permutation parse_cycles(const std::string& s, int n) {
  if (n < 1) throw input_error("parse_cycles: degree must be positive");
  Permutation g = identity_perm(n);
  size_t pos = 0;
  auto skip_ws = [&] { while (pos < s.size() && std::isspace(uint8_t(s[pos]))) ++pos; };
  skip_ws();
  if (s.compare(pos, 2, "id") == 0) {
    pos += 2;
    skip_ws();
    if (pos != s.size()) throw input_error("trailing junk after 'id': " + s);
    return g;
  }
  std::vector<bool> used(n, false);
  bool any = false;
  while (pos < s.size()) {
    skip_ws();
    if (pos == s.size()) break;
    if (s[pos] != '(') throw input_error("expected '(' in cycles: " + s);
    ++pos;
    std::vector<int> cyc;
    while (true) {
      skip_ws();
      if (pos < s.size() && s[pos] == ')') { ++pos; break; }
      size_t start = pos;
      while (pos < s.size() && std::isdigit(uint8_t(s[pos]))) ++pos;
      if (pos == start) throw input_error("expected number in cycle: " + s);
      int v = std::stoi(s.substr(start, pos - start));
      if (v < 1 || v > n) throw input_error("cycle entry out of range 1.." + std::to_string(n) + ": " + s);
      if (used[v - 1]) throw input_error("repeated entry in cycles: " + s);
      used[v - 1] = true;
      cyc.push_back(v - 1);
      skip_ws();
      if (pos < s.size() && s[pos] == ',') ++pos;  // allow comma separators
    }
    if (cyc.size() < 2) throw input_error("cycles must have length >= 2: " + s);
    for (size_t i = 0; i < cyc.size(); ++i)
      g.img[cyc[i]] = cyc[(i + 1) % cyc.size()];
    any = true;
  }
  if (!any) throw input_error("empty cycle expression: " + s);
  return g;
}

std::vector<int> SetPartition::block_sizes() const {
  std::vector<int> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(int(b.size()));
  return out;
}

std::vector<int> SetPartition::block_of() const {
  std::vector<int> of(n, -1);
  for (int b = 0; b < size(); ++b)
    for (int x : blocks[b]) of[x] = b;
  return of;
}

std::string SetPartition::str() const {
  std::string out;
  for (const auto& b : blocks) {
    out += "{";
    for (size_t i = 0; i < b.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(b[i]);
    }
    out += "}";
  }
  return out;
}

static SetPartition partition_from_block_of(const std::vector<int>& root, int n) {
  // root: representative id per element (arbitrary ids); normalize.
  std::vector<int> first_seen_order;
  std::vector<int> remap(n, -1);
  SetPartition p;
  p.n = n;
  for (int i = 0; i < n; ++i) {
    int r = root[i];
    if (remap[r] < 0) {
      remap[r] = int(p.blocks.size());
      p.blocks.emplace_back();
    }
    p.blocks[remap[r]].push_back(i);
  }
  // Blocks discovered in order of least element; entries ascend already.
  return p;
}

SetPartition orbits_of(const Permutation& g) {
  const int n = g.degree();
  std::vector<int> root(n, -1);
  for (int i = 0; i < n; ++i) {
    if (root[i] >= 0) continue;
    int j = i;
    while (root[j] < 0) {
      root[j] = i;
      j = g.img[j];
    }
  }
  return partition_from_block_of(root, n);
}

namespace {
struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};
}  // namespace

SetPartition orbit_join(const Permutation& g, const Permutation& h) {
  ORB_CHECK(g.degree() == h.degree(), "orbit_join: degree mismatch");
  const int n = g.degree();
  UnionFind uf(n);
  for (int i = 0; i < n; ++i) {
    uf.unite(i, g.img[i]);
    uf.unite(i, h.img[i]);
  }
  std::vector<int> root(n);
  for (int i = 0; i < n; ++i) root[i] = uf.find(i);
  return partition_from_block_of(root, n);
}

SetPartition join_partitions(const SetPartition& a, const SetPartition& b) {
  ORB_CHECK(a.n == b.n, "join_partitions: size mismatch");
  UnionFind uf(a.n);
  for (const auto& blk : a.blocks)
    for (size_t i = 1; i < blk.size(); ++i) uf.unite(blk[0], blk[i]);
  for (const auto& blk : b.blocks)
    for (size_t i = 1; i < blk.size(); ++i) uf.unite(blk[0], blk[i]);
  std::vector<int> root(a.n);
  for (int i = 0; i < a.n; ++i) root[i] = uf.find(i);
  return partition_from_block_of(root, a.n);
}

bool coarsens(const SetPartition& coarse, const SetPartition& fine) {
  if (coarse.n != fine.n) return false;
  auto of = coarse.block_of();
  for (const auto& blk : fine.blocks)
    for (size_t i = 1; i < blk.size(); ++i)
      if (of[blk[i]] != of[blk[0]]) return false;
  return true;
}

int Partition::sum() const { return std::accumulate(parts.begin(), parts.end(), 0); }

std::string Partition::str() const {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "+";
    out += std::to_string(parts[i]);
  }
  return out;
}

Partition cycle_type(const Permutation& g) {
  auto sizes = orbits_of(g).block_sizes();
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return Partition{sizes};
}

static void gen_partitions(int n, int max_part, std::vector<int>& cur,
                           std::vector<Partition>& out) {
  if (n == 0) {
    out.push_back(Partition{cur});
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    gen_partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

std::vector<Partition> partitions_of(int n) {
  std::vector<Partition> out;
  std::vector<int> cur;
  gen_partitions(n, n, cur, out);
  return out;
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<ClassData> conjugacy_class_data(int n) {
  std::vector<ClassData> out;
  for (const auto& p : partitions_of(n)) {
    // centralizer order = prod_k k^{m_k} m_k!  (m_k = multiplicity of k)
    std::uint64_t cent = 1;
    int run = 1;
    for (size_t i = 0; i < p.parts.size(); ++i) {
      cent *= std::uint64_t(p.parts[i]);
      if (i + 1 < p.parts.size() && p.parts[i + 1] == p.parts[i]) {
        ++run;
        cent *= std::uint64_t(run);
      } else {
        run = 1;
      }
    }
    out.push_back({p, factorial(n) / cent, cent});
  }
  return out;
}

std::vector<Permutation> all_permutations(int n) {
  std::vector<Permutation> out;
  Permutation g = identity_perm(n);
  do {
    out.push_back(g);
  } while (std::next_permutation(g.img.begin(), g.img.end()));
  return out;
}

std::vector<Permutation> centralizer(const Permutation& g,
                                     const std::vector<Permutation>& group) {
  std::vector<Permutation> out;
  for (const auto& h : group)
    if (compose(h, g) == compose(g, h)) out.push_back(h);
  return out;
}

void CaseConfig::validate() const {
  if (n < 1) throw input_error("n must be >= 1");
  if (kind == CaseKind::HilbA) {
    if (base_betti[0] != 1 || base_betti[4] != 1)
      throw input_error("base Betti vector must have b0 = b4 = 1");
    if (base_betti[1] != base_betti[3])
      throw input_error("base Betti vector must be palindromic (b1 = b3)");
    if (base_betti[1] < 0 || base_betti[2] < 1)
      throw input_error("base Betti vector entries out of range");
  } else if (!abelian_base()) {
    // The kernel construction needs the group law of the abelian surface;
    // a general base only makes sense on the symmetric-product side.
    throw input_error("base Betti vector is fixed to (1,4,6,4,1) here");
  }
}

int age(const CaseConfig& cfg, const Permutation& g) {
  ORB_CHECK(g.degree() == cfg.group_degree(), "age: wrong group degree");
  return cfg.group_degree() - orbits_of(g).size();
}

int sector_dim(const CaseConfig& cfg, int orbit_count) {
  return cfg.kind == CaseKind::HilbA ? 2 * orbit_count : 2 * (orbit_count - 1);
}

int epsilon(const CaseConfig& cfg, const Permutation& g, const Permutation& h) {
  int s = age(cfg, g) + age(cfg, h) - age(cfg, compose(g, h));
  ORB_CHECK(s % 2 == 0, "epsilon: odd age combination");
  return s / 2;
}

}  // namespace orbring
