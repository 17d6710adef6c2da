#include "orbring/algebra.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace orbring {

namespace {

// Binomial table, plenty for exterior algebras on <= 32 generators.
constexpr int kMaxN = 33;
const std::int64_t* binom_row(int n) {
  static std::int64_t table[kMaxN][kMaxN];
  static bool built = [] {
    for (int i = 0; i < kMaxN; ++i) {
      table[i][0] = 1;
      for (int j = 1; j <= i; ++j)
        table[i][j] = table[i - 1][j - 1] + (j <= i - 1 ? table[i - 1][j] : 0);
      for (int j = i + 1; j < kMaxN; ++j) table[i][j] = 0;
    }
    return true;
  }();
  (void)built;
  ORB_CHECK(n >= 0 && n < kMaxN, "binomial out of range");
  return table[n];
}
std::int64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  return binom_row(n)[k];
}

// Lexicographic rank of an ascending k-tuple from {0..m-1}.
int comb_rank(int m, const std::vector<int>& c) {
  std::int64_t rank = 0;
  int prev = -1;
  const int k = int(c.size());
  for (int j = 0; j < k; ++j) {
    for (int v = prev + 1; v < c[j]; ++v) rank += binom(m - 1 - v, k - 1 - j);
    prev = c[j];
  }
  return int(rank);
}

std::vector<int> comb_unrank(int m, int k, int idx) {
  std::vector<int> c(k);
  std::int64_t rank = idx;
  int v = 0;
  for (int j = 0; j < k; ++j) {
    while (true) {
      std::int64_t block = binom(m - 1 - v, k - 1 - j);
      if (rank < block) break;
      rank -= block;
      ++v;
    }
    c[j] = v++;
  }
  return c;
}

// Merge two ascending tuples; zero on collision; Koszul sign = parity of the
// number of pairs (a in A, b in B) with b < a.
bool merge_tuples(const std::vector<int>& a, const std::vector<int>& b,
                  std::vector<int>& out, int& sign) {
  out.clear();
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  int inv = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      inv += int(a.size() - i);
      out.push_back(b[j++]);
    } else {
      return false;  // repeated generator
    }
  }
  sign = (inv % 2 == 0) ? 1 : -1;
  return true;
}

}  // namespace

Algebra Algebra::exterior(int gens, std::vector<std::string> gen_names) {
  ORB_CHECK(gens >= 0 && gens < kMaxN - 1, "exterior: generator count out of range");
  Algebra a;
  a.kind_ = Kind::Exterior;
  a.gens_ = gens;
  if (gen_names.empty()) {
    for (int i = 1; i <= gens; ++i) gen_names.push_back("x" + std::to_string(i));
  }
  ORB_CHECK(int(gen_names.size()) == gens, "exterior: name count mismatch");
  a.gen_names_ = std::move(gen_names);
  a.top_ = gens;
  a.dims_.resize(gens + 1);
  for (int k = 0; k <= gens; ++k) a.dims_[k] = binom(gens, k);
  return a;
}

Algebra Algebra::surface(const std::array<std::int64_t, 5>& betti) {
  ORB_CHECK(betti[0] == 1 && betti[4] == 1 && betti[1] == betti[3] &&
                betti[1] >= 0 && betti[2] >= 1,
            "surface: Betti vector must be (1,b1,b2,b1,1), b2 >= 1");
  Algebra a;
  a.kind_ = Kind::Surface;
  a.betti_ = betti;
  a.top_ = 4;
  a.dims_.assign(betti.begin(), betti.end());
  return a;
}

Algebra Algebra::tensor(std::vector<Algebra> factors) {
  ORB_CHECK(!factors.empty(), "tensor: needs at least one factor");
  Algebra a;
  a.kind_ = Kind::Tensor;
  a.factors_ = std::move(factors);
  a.finish_tensor_tables();
  return a;
}

void Algebra::finish_tensor_tables() {
  top_ = 0;
  for (const auto& f : factors_) top_ += f.top();
  const int l = int(factors_.size());
  comps_.assign(top_ + 1, {});
  comp_offsets_.assign(top_ + 1, {});
  // Enumerate compositions lexicographically (first factor most significant).
  std::vector<int> cur(l);
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (i == l) {
      const int deg = used;
      comps_[deg].push_back(cur);
      return;
    }
    for (int d = 0; d <= factors_[i].top() && used + d <= top_; ++d) {
      cur[i] = d;
      self(self, i + 1, used + d);
    }
  };
  rec(rec, 0, 0);
  dims_.assign(top_ + 1, 0);
  for (int deg = 0; deg <= top_; ++deg) {
    comp_offsets_[deg].reserve(comps_[deg].size() + 1);
    std::int64_t off = 0;
    for (const auto& c : comps_[deg]) {
      comp_offsets_[deg].push_back(off);
      std::int64_t block = 1;
      for (int i = 0; i < l; ++i) block *= factors_[i].dim(c[i]);
      off += block;
    }
    comp_offsets_[deg].push_back(off);
    dims_[deg] = off;
  }
  ORB_CHECK(dims_[top_] == 1, "tensor: top degree must be one-dimensional");
}

int Algebra::dim(int deg) const {
  if (deg < 0 || deg > top_) return 0;
  return int(dims_[deg]);
}

std::int64_t Algebra::total_dim() const {
  return std::accumulate(dims_.begin(), dims_.end(), std::int64_t(0));
}

std::vector<std::int64_t> Algebra::poincare() const { return dims_; }

std::vector<int> Algebra::exterior_tuple(int deg, int idx) const {
  ORB_CHECK(kind_ == Kind::Exterior, "exterior_tuple on non-exterior model");
  ORB_CHECK(deg >= 0 && deg <= top_ && idx >= 0 && idx < dim(deg),
            "index out of range");
  return comb_unrank(gens_, deg, idx);
}

int Algebra::exterior_rank(const std::vector<int>& tuple) const {
  ORB_CHECK(kind_ == Kind::Exterior, "exterior_rank on non-exterior model");
  return comb_rank(gens_, tuple);
}

std::vector<std::pair<int, int>> Algebra::tensor_parts(int deg, int idx) const {
  ORB_CHECK(kind_ == Kind::Tensor, "tensor_parts on non-tensor model");
  ORB_CHECK(deg >= 0 && deg <= top_ && idx >= 0 && idx < dim(deg),
            "index out of range");
  const auto& offs = comp_offsets_[deg];
  // Find the composition block containing idx.
  int lo = 0, hi = int(comps_[deg].size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (offs[mid] <= idx) lo = mid; else hi = mid - 1;
  }
  const auto& comp = comps_[deg][lo];
  std::int64_t local = idx - offs[lo];
  const int l = int(factors_.size());
  std::vector<std::pair<int, int>> parts(l);
  for (int i = l - 1; i >= 0; --i) {
    int d = comp[i];
    std::int64_t fd = factors_[i].dim(d);
    parts[i] = {d, int(local % fd)};
    local /= fd;
  }
  return parts;
}

int Algebra::tensor_index(const std::vector<std::pair<int, int>>& parts) const {
  ORB_CHECK(kind_ == Kind::Tensor, "tensor_index on non-tensor model");
  const int l = int(factors_.size());
  ORB_CHECK(int(parts.size()) == l, "tensor_index: wrong part count");
  int deg = 0;
  std::vector<int> comp(l);
  for (int i = 0; i < l; ++i) {
    comp[i] = parts[i].first;
    deg += parts[i].first;
  }
  const auto& list = comps_[deg];
  auto it = std::lower_bound(list.begin(), list.end(), comp);
  ORB_CHECK(it != list.end() && *it == comp, "tensor_index: unknown composition");
  int ci = int(it - list.begin());
  std::int64_t idx = comp_offsets_[deg][ci];
  std::int64_t stride = 1;
  for (int i = l - 1; i >= 0; --i) {
    idx += parts[i].second * stride;
    stride *= factors_[i].dim(comp[i]);
  }
  return int(idx);
}

SparseVec Algebra::mul(int da, int ia, int db, int ib) const {
  ORB_CHECK(da >= 0 && da <= top_ && ia >= 0 && ia < dim(da) && db >= 0 &&
                db <= top_ && ib >= 0 && ib < dim(db),
            "index out of range");
  const int deg = da + db;
  if (deg > top_) return {};
  switch (kind_) {
    case Kind::Exterior: {
      auto a = comb_unrank(gens_, da, ia);
      auto b = comb_unrank(gens_, db, ib);
      std::vector<int> m;
      int sign;
      if (!merge_tuples(a, b, m, sign)) return {};
      return {{comb_rank(gens_, m), Rat(sign)}};
    }
    case Kind::Surface: {
      if (da == 0) return {{ib, Rat(1)}};
      if (db == 0) return {{ia, Rat(1)}};
      if (da == 1 && db == 3) return ia == ib ? SparseVec{{0, Rat(1)}} : SparseVec{};
      if (da == 3 && db == 1) return ia == ib ? SparseVec{{0, Rat(-1)}} : SparseVec{};
      if (da == 2 && db == 2) return ia == ib ? SparseVec{{0, Rat(1)}} : SparseVec{};
      return {};  // all other positive-degree products vanish in this model
    }
    case Kind::Tensor: {
      auto pa = tensor_parts(da, ia);
      auto pb = tensor_parts(db, ib);
      const int l = int(factors_.size());
      // Koszul sign: b_j crosses a_i for every i > j.
      int cross = 0;
      for (int j = 0; j < l; ++j) {
        if (pb[j].first % 2 == 0) continue;
        for (int i = j + 1; i < l; ++i) cross += pa[i].first;
      }
      int sign = (cross % 2 == 0) ? 1 : -1;
      // Outer product of per-factor sparse results, tracked as (parts, coeff).
      std::vector<std::pair<std::vector<std::pair<int, int>>, Rat>> partial;
      partial.push_back({{}, Rat(sign)});
      for (int i = 0; i < l; ++i) {
        SparseVec fi = factors_[i].mul(pa[i].first, pa[i].second, pb[i].first,
                                       pb[i].second);
        if (fi.empty()) return {};
        const int fd = pa[i].first + pb[i].first;
        std::vector<std::pair<std::vector<std::pair<int, int>>, Rat>> next;
        next.reserve(partial.size() * fi.size());
        for (const auto& [parts, coef] : partial)
          for (const auto& [fidx, fc] : fi) {
            auto p2 = parts;
            p2.emplace_back(fd, fidx);
            next.push_back({std::move(p2), coef * fc});
          }
        partial = std::move(next);
      }
      SparseVec out;
      out.reserve(partial.size());
      for (const auto& [parts, coef] : partial)
        out.emplace_back(tensor_index(parts), coef);
      std::sort(out.begin(), out.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      return out;
    }
  }
  return {};
}

std::pair<int, int> Algebra::dual(int deg, int idx) const {
  ORB_CHECK(deg >= 0 && deg <= top_ && idx >= 0 && idx < dim(deg),
            "index out of range");
  switch (kind_) {
    case Kind::Exterior: {
      auto t = comb_unrank(gens_, deg, idx);
      std::vector<int> comp;
      comp.reserve(gens_ - deg);
      size_t p = 0;
      for (int v = 0; v < gens_; ++v) {
        if (p < t.size() && t[p] == v) { ++p; continue; }
        comp.push_back(v);
      }
      std::vector<int> m;
      int sign;
      bool ok = merge_tuples(t, comp, m, sign);
      ORB_CHECK(ok, "dual: complement collision");
      return {comb_rank(gens_, comp), sign};
    }
    case Kind::Surface: {
      if (deg == 0) return {0, 1};
      if (deg == 4) return {0, 1};
      if (deg == 1) return {idx, 1};   // a_i . c_i = v
      if (deg == 3) return {idx, -1};  // c_i . a_i = -v
      return {idx, 1};                 // f_i . f_i = v
    }
    case Kind::Tensor: {
      auto parts = tensor_parts(deg, idx);
      const int l = int(factors_.size());
      std::vector<std::pair<int, int>> dparts(l);
      int sign = 1, cross = 0;
      for (int i = 0; i < l; ++i) {
        auto [di, si] = factors_[i].dual(parts[i].first, parts[i].second);
        dparts[i] = {factors_[i].top() - parts[i].first, di};
        if (si < 0) sign = -sign;
      }
      // Koszul crossings when multiplying m * dual(m) factorwise.
      for (int j = 0; j < l; ++j) {
        if (dparts[j].first % 2 == 0) continue;
        for (int i = j + 1; i < l; ++i) cross += parts[i].first;
      }
      if (cross % 2 != 0) sign = -sign;
      return {tensor_index(dparts), sign};
    }
  }
  return {0, 1};
}

Rat Algebra::integrate(int deg, int idx) const {
  ORB_CHECK(deg >= 0 && deg <= top_ && idx >= 0 && idx < dim(deg),
            "index out of range");
  return (deg == top_ && idx == 0) ? Rat(1) : Rat(0);
}

std::string Algebra::label(int deg, int idx) const {
  switch (kind_) {
    case Kind::Exterior: {
      if (deg == 0) return "1";
      auto t = exterior_tuple(deg, idx);
      std::string out;
      for (size_t i = 0; i < t.size(); ++i) {
        if (i) out += "^";
        out += gen_names_[t[i]];
      }
      return out;
    }
    case Kind::Surface: {
      if (deg == 0) return "1";
      if (deg == 4) return "v";
      const char* fam = deg == 1 ? "a" : deg == 2 ? "f" : "c";
      return fam + std::to_string(idx + 1);
    }
    case Kind::Tensor: {
      auto parts = tensor_parts(deg, idx);
      std::string out;
      for (int i = 0; i < int(parts.size()); ++i) {
        if (i) out += "|";
        out += factors_[i].label(parts[i].first, parts[i].second);
      }
      return out;
    }
  }
  return {};
}

std::pair<int, int> Algebra::parse_label(const std::string& s) const {
  switch (kind_) {
    case Kind::Exterior: {
      if (s == "1") return {0, 0};
      std::vector<int> tuple;
      size_t pos = 0;
      while (pos <= s.size()) {
        size_t next = s.find('^', pos);
        std::string name = s.substr(pos, next == std::string::npos ? next : next - pos);
        int found = -1;
        for (int i = 0; i < gens_; ++i)
          if (gen_names_[i] == name) { found = i; break; }
        if (found < 0) throw input_error("unknown generator '" + name + "'");
        if (!tuple.empty() && found <= tuple.back())
          throw input_error("generators must be strictly ascending: " + s);
        tuple.push_back(found);
        if (next == std::string::npos) break;
        pos = next + 1;
      }
      return {int(tuple.size()), comb_rank(gens_, tuple)};
    }
    case Kind::Surface: {
      if (s == "1") return {0, 0};
      if (s == "v") return {4, 0};
      if (s.size() >= 2) {
        int deg = s[0] == 'a' ? 1 : s[0] == 'f' ? 2 : s[0] == 'c' ? 3 : -1;
        if (deg > 0) {
          int idx = std::stoi(s.substr(1)) - 1;
          if (idx >= 0 && idx < dim(deg)) return {deg, idx};
        }
      }
      throw input_error("bad surface monomial: " + s);
    }
    case Kind::Tensor: {
      std::vector<std::pair<int, int>> parts;
      size_t pos = 0;
      for (int i = 0; i < factor_count(); ++i) {
        size_t next = s.find('|', pos);
        bool last = (i + 1 == factor_count());
        if (last != (next == std::string::npos))
          throw input_error("wrong number of '|'-separated factors: " + s);
        parts.push_back(factors_[i].parse_label(
            s.substr(pos, last ? std::string::npos : next - pos)));
        pos = next + 1;
      }
      int deg = 0;
      for (auto& [d, _] : parts) deg += d;
      return {deg, tensor_index(parts)};
    }
  }
  throw input_error("bad monomial: " + s);
}

SparseVec Algebra::wedge(const std::vector<SparseVec>& ones) const {
  // Fold product of degree-1 elements, in any model with degree-1 classes.
  SparseVec acc{{0, Rat(1)}};
  int deg = 0;
  for (const auto& form : ones) {
    SparseVec next;
    for (const auto& [ia, ca] : acc)
      for (const auto& [ib, cb] : form) {
        SparseVec prod = mul(deg, ia, 1, ib);
        Rat scale = ca * cb;
        sparse_add(next, prod, scale);
      }
    ++deg;
    if (next.empty()) return {};
    acc = std::move(next);
  }
  return acc;
}

bool Algebra::mask_capable() const {
  if (kind_ == Kind::Exterior) return gens_ <= 64;
  if (kind_ != Kind::Tensor) return false;
  int t = 0;
  for (const auto& f : factors_) {
    if (f.kind() != Kind::Exterior) return false;
    t += f.gens();
  }
  return t <= 64;
}

int Algebra::total_gens() const {
  ORB_CHECK(mask_capable(), "total_gens: no mask representation");
  if (kind_ == Kind::Exterior) return gens_;
  int t = 0;
  for (const auto& f : factors_) t += f.gens();
  return t;
}

std::uint64_t Algebra::mask_of(int deg, int idx) const {
  ORB_CHECK(mask_capable(), "mask path unavailable");
  std::uint64_t m = 0;
  if (kind_ == Kind::Exterior) {
    for (int b : exterior_tuple(deg, idx)) m |= 1ull << b;
    return m;
  }
  auto parts = tensor_parts(deg, idx);
  int off = 0;
  for (int f = 0; f < factor_count(); ++f) {
    for (int b : factors_[f].exterior_tuple(parts[f].first, parts[f].second))
      m |= 1ull << (off + b);
    off += factors_[f].gens();
  }
  return m;
}

std::pair<int, int> Algebra::index_of_mask(std::uint64_t m) const {
  ORB_CHECK(mask_capable(), "mask path unavailable");
  if (kind_ == Kind::Exterior) {
    std::vector<int> tup;
    for (int b = 0; b < gens_; ++b)
      if (m >> b & 1) tup.push_back(b);
    return {int(tup.size()), exterior_rank(tup)};
  }
  std::vector<std::pair<int, int>> parts(factor_count());
  int off = 0, deg = 0;
  for (int f = 0; f < factor_count(); ++f) {
    std::vector<int> tup;
    for (int b = 0; b < factors_[f].gens(); ++b)
      if (m >> (off + b) & 1) tup.push_back(b);
    deg += int(tup.size());
    parts[f] = {int(tup.size()), factors_[f].exterior_rank(tup)};
    off += factors_[f].gens();
  }
  return {deg, tensor_index(parts)};
}

int Algebra::mask_crossing_parity(std::uint64_t a, std::uint64_t b) {
  int par = 0;
  std::uint64_t rest = a;
  while (rest) {
    int i = std::countr_zero(rest);
    rest &= rest - 1;
    par ^= std::popcount(b & ((1ull << i) - 1)) & 1;
  }
  return par;
}

SparseVec Algebra::mul_vec(int da, const SparseVec& va, int db,
                           const SparseVec& vb) const {
  if (va.empty() || vb.empty() || da + db > top_) return {};
  if (!mask_capable()) {
    SparseVec acc;
    for (const auto& [i, ci] : va)
      for (const auto& [j, cj] : vb)
        sparse_add(acc, mul(da, i, db, j), ci * cj);
    return acc;
  }
  std::vector<std::uint64_t> ma(va.size()), mb(vb.size());
  for (std::size_t k = 0; k < va.size(); ++k) ma[k] = mask_of(da, va[k].first);
  for (std::size_t k = 0; k < vb.size(); ++k) mb[k] = mask_of(db, vb[k].first);
  std::vector<std::pair<int, Rat>> terms;
  for (std::size_t x = 0; x < va.size(); ++x)
    for (std::size_t y = 0; y < vb.size(); ++y) {
      if (ma[x] & mb[y]) continue;
      int idx = index_of_mask(ma[x] | mb[y]).second;
      Rat c = va[x].second * vb[y].second;
      if (mask_crossing_parity(ma[x], mb[y])) c = -c;
      terms.emplace_back(idx, std::move(c));
    }
  std::sort(terms.begin(), terms.end(),
            [](const auto& p, const auto& q) { return p.first < q.first; });
  SparseVec out;
  for (auto& [i, c] : terms) {
    if (!out.empty() && out.back().first == i) {
      out.back().second += c;
      if (out.back().second == 0) out.pop_back();
    } else if (c != 0) {
      out.emplace_back(i, std::move(c));
    }
  }
  return out;
}

QuotientModel quotient_exterior(int ambient_gens, const MatrixQ& relations,
                                const std::vector<std::string>& ambient_names) {
  ORB_CHECK(relations.cols() == ambient_gens, "quotient: relation width mismatch");
  auto rr = rref_kernel(relations);
  if (rr.rank != relations.rows())
    throw input_error("dependent relations in quotient model");
  QuotientModel q;
  std::vector<bool> is_pivot(ambient_gens, false);
  for (int c : rr.pivot_cols) is_pivot[c] = true;
  std::vector<std::string> kept_names;
  std::vector<int> pos(ambient_gens, -1);
  for (int c = 0; c < ambient_gens; ++c) {
    if (is_pivot[c]) continue;
    pos[c] = int(q.kept.size());
    q.kept.push_back(c);
    kept_names.push_back(ambient_names.empty() ? "x" + std::to_string(c + 1)
                                               : ambient_names[c]);
  }
  q.model = Algebra::exterior(int(q.kept.size()), kept_names);
  q.proj1.resize(ambient_gens);
  for (int c = 0; c < ambient_gens; ++c) {
    if (!is_pivot[c]) {
      q.proj1[c] = {{pos[c], Rat(1)}};
      continue;
    }
    // pivot column: row r with pivot at c gives x_c = -sum over free columns
    int r = int(std::lower_bound(rr.pivot_cols.begin(), rr.pivot_cols.end(), c) -
                rr.pivot_cols.begin());
    SparseVec v;
    for (int c2 = 0; c2 < ambient_gens; ++c2) {
      if (is_pivot[c2] || rr.rref.at(r, c2) == 0) continue;
      v.emplace_back(pos[c2], -rr.rref.at(r, c2));
    }
    q.proj1[c] = std::move(v);
  }
  return q;
}

}  // namespace orbring
