#include "orbring/ring.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace orbring {

// --------------------------------------------------------------------------
// key packing

namespace {

constexpr int kGShift = 45;     // 19 bits for the group element
constexpr int kDegShift = 39;   // 6 bits for the model degree
constexpr int kCompShift = 28;  // 11 bits for the component label
constexpr std::uint64_t kIdxCap = 1ull << kCompShift;
constexpr std::uint64_t kCompCap = 1ull << (kDegShift - kCompShift);
constexpr std::uint64_t kDegCap = 1ull << (kGShift - kDegShift);
constexpr std::uint64_t kGCap = 1ull << (64 - kGShift);

std::string fmt_count(std::int64_t n, const char* noun) {
  return std::to_string(n) + " " + noun + (n == 1 ? "" : "s");
}

}  // namespace

std::uint64_t pack_key(const BasisKey& k) {
  ORB_CHECK(k.g >= 0 && std::uint64_t(k.g) < kGCap &&      //
                k.deg >= 0 && std::uint64_t(k.deg) < kDegCap &&
                k.comp >= 0 && std::uint64_t(k.comp) < kCompCap &&
                k.idx >= 0 && std::uint64_t(k.idx) < kIdxCap,
            "basis key outside packing range");
  return (std::uint64_t(k.g) << kGShift) | (std::uint64_t(k.deg) << kDegShift) |
         (std::uint64_t(k.comp) << kCompShift) | std::uint64_t(k.idx);
}

BasisKey unpack_key(std::uint64_t u) {
  BasisKey k;
  k.g = int(u >> kGShift);
  k.deg = int((u >> kDegShift) & (kDegCap - 1));
  k.comp = int((u >> kCompShift) & (kCompCap - 1));
  k.idx = int(u & (kIdxCap - 1));
  return k;
}

void element_add(Element& acc, const Element& v, const Rat& scale) {
  if (v.empty() || scale == 0) return;
  Element out;
  out.reserve(acc.size() + v.size());
  std::size_t i = 0, j = 0;
  while (i < acc.size() || j < v.size()) {
    if (j == v.size() || (i < acc.size() && acc[i].first < v[j].first)) {
      out.push_back(acc[i++]);
    } else if (i == acc.size() || v[j].first < acc[i].first) {
      out.emplace_back(v[j].first, v[j].second * scale);
      ++j;
    } else {
      Rat c = acc[i].second + v[j].second * scale;
      if (c != 0) out.emplace_back(acc[i].first, c);
      ++i, ++j;
    }
  }
  acc = std::move(out);
}

bool element_eq(const Element& a, const Element& b) { return a == b; }

// --------------------------------------------------------------------------
// construction

OrbifoldRing::OrbifoldRing(CaseConfig cfg, bool discrete_torsion,
                           RingBounds bounds)
    : cfg_(std::move(cfg)), dt_(discrete_torsion), bounds_(bounds) {
  cfg_.validate();
  const int N = cfg_.group_degree();
  const std::uint64_t order = factorial(N);
  if (order > std::uint64_t(bounds_.max_group_order))
    throw bound_error("group order " + std::to_string(order) +
                      " exceeds the limit " +
                      std::to_string(bounds_.max_group_order));

  group_ = all_permutations(N);
  part_of_g_.resize(group_.size());
  sector_of_g_.resize(group_.size());
  flat_offset_.assign(group_.size() + 1, 0);

  std::int64_t total = 0;
  for (std::size_t gi = 0; gi < group_.size(); ++gi) {
    const int pid = register_partition(orbits_of(group_[gi]));
    part_of_g_[gi] = pid;
    sector_of_g_[gi] = sectors_[pid];
    flat_offset_[gi] = total;

    const SectorGeometry& s = *sector_of_g_[gi];
    ORB_CHECK(std::uint64_t(s.model.top()) < kDegCap &&
                  std::uint64_t(s.comp_count) < kCompCap &&
                  std::uint64_t(s.model.total_dim()) < kIdxCap,
              "sector exceeds key packing capacity");
    total += std::int64_t(s.comp_count) * s.model.total_dim();
    if (total > bounds_.max_total_dim)
      throw bound_error("total basis size exceeds the limit " +
                        std::to_string(bounds_.max_total_dim));
  }
  flat_offset_[group_.size()] = total;
  basis_size_ = total;
  ORB_CHECK(group_[0] == identity_perm(N), "identity is not first in order");
}

int OrbifoldRing::register_partition(const SetPartition& p) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = part_ids_.find(p.blocks);
  if (it != part_ids_.end()) return it->second;
  const int id = int(sectors_.size());
  sectors_.push_back(
      std::make_shared<const SectorGeometry>(build_sector(cfg_, p)));
  part_ids_.emplace(p.blocks, id);
  return id;
}

int OrbifoldRing::partition_id(const SetPartition& p) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = part_ids_.find(p.blocks);
  return it == part_ids_.end() ? -1 : it->second;
}

const SectorGeometry& OrbifoldRing::sector_by_part(int pid) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  ORB_CHECK(pid >= 0 && pid < int(sectors_.size()), "bad partition id");
  return *sectors_[pid];
}

std::vector<int> OrbifoldRing::generator_indices() const {
  const int N = cfg_.group_degree();
  if (N < 2) return {};
  Permutation t = identity_perm(N);
  std::swap(t.img[0], t.img[1]);
  Permutation c;
  c.img.resize(N);
  for (int i = 0; i < N; ++i) c.img[i] = (i + 1) % N;
  std::vector<int> out{element_index(t)};
  const int ci = element_index(c);
  if (ci != out[0]) out.push_back(ci);
  return out;
}

// --------------------------------------------------------------------------
// group / pair bookkeeping

int OrbifoldRing::element_index(const Permutation& p) const {
  if (p.degree() != cfg_.group_degree() || !is_permutation(p))
    throw input_error("not a permutation of the acting group");
  auto it = std::lower_bound(group_.begin(), group_.end(), p);
  ORB_CHECK(it != group_.end() && *it == p, "group element lookup failed");
  return int(it - group_.begin());
}

const PairInfo& OrbifoldRing::pair_info(int gi, int hi) const {
  ORB_CHECK(gi >= 0 && gi < group_order() && hi >= 0 && hi < group_order(),
            "group index out of range");
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const std::int64_t key = std::int64_t(gi) * group_order() + hi;
  auto it = pair_cache_.find(key);
  if (it != pair_cache_.end()) return it->second;

  PairInfo pi;
  pi.ghi = element_index(compose(group_[gi], group_[hi]));
  pi.jpart = register_partition(orbit_join(group_[gi], group_[hi]));
  const int jdim = sectors_[pi.jpart]->dimC;
  pi.codim = sector(pi.ghi).dimC - jdim;
  ORB_CHECK(pi.codim >= 0, "join sector exceeds the product sector");
  const int defect = sector(gi).age + sector(hi).age - sector(pi.ghi).age;
  ORB_CHECK(defect % 2 == 0, "odd age defect");
  pi.eps = defect / 2;
  pi.rank = defect - pi.codim;
  ORB_CHECK(pi.rank >= 0, "negative obstruction rank");
  return pair_cache_.emplace(key, pi).first->second;
}

// --------------------------------------------------------------------------
// basis bookkeeping

std::int64_t OrbifoldRing::sector_basis_size(int gi) const {
  ORB_CHECK(gi >= 0 && gi < group_order(), "group index out of range");
  return flat_offset_[gi + 1] - flat_offset_[gi];
}

void OrbifoldRing::validate_key(const BasisKey& k) const {
  if (k.g < 0 || k.g >= group_order())
    throw input_error("basis key: group index out of range");
  const SectorGeometry& s = sector(k.g);
  if (k.comp < 0 || k.comp >= s.comp_count)
    throw input_error("basis key: component label out of range");
  if (k.deg < 0 || k.deg > s.model.top() || k.idx < 0 ||
      k.idx >= s.model.dim(k.deg))
    throw input_error("basis key: no such model monomial");
}

BasisKey OrbifoldRing::key_of_flat(std::int64_t flat) const {
  if (flat < 0 || flat >= basis_size_)
    throw input_error("flat basis index out of range");
  const int gi =
      int(std::upper_bound(flat_offset_.begin(), flat_offset_.end(), flat) -
          flat_offset_.begin()) -
      1;
  std::int64_t local = flat - flat_offset_[gi];
  const SectorGeometry& s = sector(gi);
  for (int deg = 0; deg <= s.model.top(); ++deg) {
    const std::int64_t dim = s.model.dim(deg);
    const std::int64_t block = std::int64_t(s.comp_count) * dim;
    if (local < block)
      return BasisKey{gi, int(local / dim), deg, int(local % dim)};
    local -= block;
  }
  throw internal_error("flat index walked off the sector");
}

std::int64_t OrbifoldRing::flat_of_key(const BasisKey& k) const {
  validate_key(k);
  const SectorGeometry& s = sector(k.g);
  std::int64_t off = flat_offset_[k.g];
  for (int deg = 0; deg < k.deg; ++deg)
    off += std::int64_t(s.comp_count) * s.model.dim(deg);
  return off + std::int64_t(k.comp) * s.model.dim(k.deg) + k.idx;
}

int OrbifoldRing::total_degree(const BasisKey& k) const {
  return k.deg + 2 * sector(k.g).age;
}

std::string OrbifoldRing::key_label(const BasisKey& k) const {
  validate_key(k);
  return print_cycles(group_[k.g]) + "[" + std::to_string(k.comp) + "] " +
         sector(k.g).model.label(k.deg, k.idx);
}

BasisKey OrbifoldRing::parse_key(const std::string& s) const {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t semi = s.find(';', pos);
    fields.push_back(s.substr(pos, semi == std::string::npos ? semi
                                                             : semi - pos));
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  if (fields.size() != 3)
    throw input_error("basis element must be \"cycles;component;monomial\"");
  for (auto& f : fields) {
    while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    while (!f.empty() && f.back() == ' ') f.pop_back();
  }
  BasisKey k;
  k.g = element_index(parse_cycles(fields[0], cfg_.group_degree()));
  try {
    std::size_t used = 0;
    k.comp = std::stoi(fields[1], &used);
    if (used != fields[1].size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw input_error("component label is not an integer: " + fields[1]);
  }
  const SectorGeometry& sec = sector(k.g);
  if (k.comp < 0 || k.comp >= sec.comp_count)
    throw input_error("component label out of range (sector has " +
                      std::to_string(sec.comp_count) + ")");
  std::tie(k.deg, k.idx) = sec.model.parse_label(fields[2]);
  return k;
}

// --------------------------------------------------------------------------
// sector maps

const SectorHom& OrbifoldRing::restriction_hom(int src_part,
                                               int dst_part) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto key = std::make_pair(src_part, dst_part);
  auto it = restr_cache_.find(key);
  if (it != restr_cache_.end()) return it->second;
  ORB_CHECK(src_part >= 0 && src_part < int(sectors_.size()) &&
                dst_part >= 0 && dst_part < int(sectors_.size()),
            "bad partition id");
  return restr_cache_
      .emplace(key,
               SectorHom::restriction(sectors_[src_part], sectors_[dst_part]))
      .first->second;
}

const SectorHom& OrbifoldRing::conjugation_hom(int hi, int gi) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto key = std::make_pair(hi, gi);
  auto it = conj_cache_.find(key);
  if (it != conj_cache_.end()) return it->second;
  const Permutation& h = group_[hi];
  const int ti = element_index(compose(compose(h, group_[gi]), inverse(h)));
  return conj_cache_
      .emplace(key, SectorHom::conjugation(sector_of_g_[gi], sector_of_g_[ti],
                                           h))
      .first->second;
}

SparseVec OrbifoldRing::gysin_apply(int jpid, int tpid, int deg,
                                    const SparseVec& v) const {
  if (v.empty()) return {};
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto key = std::make_tuple(jpid, tpid, deg);
  auto it = gysin_cache_.find(key);
  if (it == gysin_cache_.end()) {
    // Columns of the pushforward in one degree, from the adjunction
    //   <push(x), eta>_dst = <x, pull(eta)>_src
    // and the monomial-dual pairing on both sides: the eta dual to a target
    // monomial zeta picks out the coefficient of zeta, and pull(eta) pairs
    // against exactly one source monomial x.
    const std::shared_ptr<const SectorGeometry> sj = sectors_[jpid];
    const std::shared_ptr<const SectorGeometry> st = sectors_[tpid];
    const Algebra& A = sj->model;
    const Algebra& B = st->model;
    ORB_CHECK(deg >= 0 && deg <= A.top(), "pushforward degree out of range");
    const int cod2 = B.top() - A.top();
    ORB_CHECK(cod2 >= 0 && cod2 % 2 == 0, "target model smaller than source");
    const int out_deg = deg + cod2;
    const int comp_deg = A.top() - deg;  // degree of the dual test classes
    const SectorHom& pull = restriction_hom(tpid, jpid);

    std::vector<SparseVec> cols(A.dim(deg));
    const int flip = (deg % 2 && comp_deg % 2) ? -1 : 1;
    for (int iz = 0; iz < B.dim(out_deg); ++iz) {
      const auto [pz, sz] = B.dual(out_deg, iz);
      const SparseVec& w = pull.apply(comp_deg, pz);
      for (const auto& [mi, wc] : w) {
        const auto [xi, sx] = A.dual(comp_deg, mi);
        // <x, m> = (-1)^{deg * comp_deg} <m, x>
        cols[xi].emplace_back(iz, wc * Rat(flip * sx * sz));
      }
    }
    it = gysin_cache_.emplace(key, std::move(cols)).first;
  }
  SparseVec out;
  for (const auto& [i, c] : v) sparse_add(out, it->second[i], c);
  return out;
}

// --------------------------------------------------------------------------
// star product

OrbifoldRing::PipelineOut OrbifoldRing::pipeline(int gi, int hi, int da,
                                                 int ia, int db, int ib) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const PairInfo& pi = pair_info(gi, hi);
  PipelineOut out;
  out.out_deg = da + db + 2 * pi.codim;
  const SectorHom& ra = restriction_hom(part_of_g_[gi], pi.jpart);
  const SparseVec& va = ra.apply(da, ia);
  if (va.empty()) return out;
  const SectorHom& rb = restriction_hom(part_of_g_[hi], pi.jpart);
  const SparseVec& vb = rb.apply(db, ib);
  if (vb.empty()) return out;
  const std::shared_ptr<const SectorGeometry> sj = sectors_[pi.jpart];
  SparseVec prod = sj->model.mul_vec(da, va, db, vb);
  if (prod.empty()) return out;
  out.v = gysin_apply(pi.jpart, part_of_g_[pi.ghi], da + db, prod);
  return out;
}

std::vector<std::pair<int, std::int64_t>> OrbifoldRing::comp_mults(
    int gi, int hi, const PairInfo& pi, int ca, int cb) const {
  if (cfg_.kind == CaseKind::HilbA) return {{0, 1}};
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const SectorGeometry& sg = sector(gi);
  const SectorGeometry& sh = sector(hi);
  const SectorGeometry& sgh = sector(pi.ghi);
  const int dj = sectors_[pi.jpart]->d;
  const auto ta = sg.comp_unpack(ca);
  const auto tb = sh.comp_unpack(cb);

  // Component tau' of the join locus sits inside component tau' mod d of
  // each enclosing fixed locus, so per H^1-letter we bucket the compatible
  // join residues by their residue in the product sector.
  std::array<std::vector<std::int64_t>, 4> buckets;
  for (int j = 0; j < 4; ++j) {
    buckets[j].assign(sgh.d, 0);
    for (int t = 0; t < dj; ++t)
      if (t % sg.d == ta[j] && t % sh.d == tb[j]) ++buckets[j][t % sgh.d];
  }
  std::vector<std::pair<int, std::int64_t>> out;
  for (int comp = 0; comp < sgh.comp_count; ++comp) {
    const auto tc = sgh.comp_unpack(comp);
    std::int64_t m = 1;
    for (int j = 0; j < 4; ++j) m *= buckets[j][tc[j]];
    if (m != 0) out.emplace_back(comp, m);
  }
  return out;
}

Element OrbifoldRing::star_basis(const BasisKey& a, const BasisKey& b) const {
  validate_key(a);
  validate_key(b);
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const PairInfo& pi = pair_info(a.g, b.g);
  if (pi.rank > 0) return {};
  const auto mults = comp_mults(a.g, b.g, pi, a.comp, b.comp);
  if (mults.empty()) return {};
  const PipelineOut p = pipeline(a.g, b.g, a.deg, a.idx, b.deg, b.idx);
  if (p.v.empty()) return {};
  const Rat sign((dt_ && pi.eps % 2) ? -1 : 1);

  Element out;
  out.reserve(mults.size() * p.v.size());
  for (const auto& [comp, m] : mults)
    for (const auto& [iz, c] : p.v)
      out.emplace_back(pack_key({pi.ghi, comp, p.out_deg, iz}),
                       c * Rat(m) * sign);
  return out;
}

Element OrbifoldRing::star(const Element& a, const Element& b) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  Element acc;
  for (const auto& [ka, ca] : a) {
    const BasisKey ua = unpack_key(ka);
    for (const auto& [kb, cb] : b)
      element_add(acc, star_basis(ua, unpack_key(kb)), ca * cb);
  }
  return acc;
}

Element OrbifoldRing::g_action(int hi, const Element& a) const {
  ORB_CHECK(hi >= 0 && hi < group_order(), "group index out of range");
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const Permutation& h = group_[hi];
  Element acc;
  for (const auto& [k, c] : a) {
    const BasisKey u = unpack_key(k);
    const int ti =
        element_index(compose(compose(h, group_[u.g]), inverse(h)));
    const SectorHom& hom = conjugation_hom(hi, u.g);
    const SparseVec& img = hom.apply(u.deg, u.idx);
    Element part;
    part.reserve(img.size());
    // Conjugation preserves torsion labels, so the component index rides
    // along unchanged.
    for (const auto& [iz, cz] : img)
      part.emplace_back(pack_key({ti, u.comp, u.deg, iz}), cz);
    element_add(acc, part, c);
  }
  return acc;
}

Element OrbifoldRing::unit() const {
  return {{pack_key({0, 0, 0, 0}), Rat(1)}};
}

Element OrbifoldRing::sector_unit(int gi) const {
  ORB_CHECK(gi >= 0 && gi < group_order(), "group index out of range");
  Element out;
  for (int comp = 0; comp < sector(gi).comp_count; ++comp)
    out.emplace_back(pack_key({gi, comp, 0, 0}), Rat(1));
  return out;
}

int OrbifoldRing::element_total_degree(const Element& a) const {
  if (a.empty()) return -1;
  const int d = total_degree(unpack_key(a.front().first));
  for (const auto& [k, c] : a)
    if (total_degree(unpack_key(k)) != d)
      throw input_error("element is not homogeneous");
  return d;
}

// --------------------------------------------------------------------------
// graded dimensions

Poly OrbifoldRing::poincare_total() const {
  Poly out;
  for (int gi = 0; gi < group_order(); ++gi) {
    const SectorGeometry& s = sector(gi);
    out = poly_add(out, poly_shift(s.betti(), 2 * s.age));
  }
  return out;
}

std::vector<std::int64_t> OrbifoldRing::ck_grading() const {
  std::vector<std::int64_t> buckets(4 * cfg_.n + 1, 0);
  for (std::int64_t flat = 0; flat < basis_size_; ++flat) {
    const int d = total_degree(key_of_flat(flat));
    ORB_CHECK(d >= 0 && d < int(buckets.size()), "degree outside the range");
    ++buckets[d];
  }
  return buckets;
}

namespace {

// Graded trace of a sector endomorphism, per model degree.  Uses the
// non-memoizing image path: trace sweeps touch each monomial once.
std::vector<Rat> hom_trace(const SectorHom& hom) {
  const Algebra& model = hom.src().model;
  std::vector<Rat> tr(model.top() + 1, Rat(0));
  for (int deg = 0; deg <= model.top(); ++deg)
    for (int idx = 0; idx < model.dim(deg); ++idx) {
      const SparseVec img = hom.apply_raw(deg, idx);
      auto it = std::lower_bound(
          img.begin(), img.end(), idx,
          [](const auto& p, int i) { return p.first < i; });
      if (it != img.end() && it->first == idx) tr[deg] += it->second;
    }
  return tr;
}

}  // namespace

Poly OrbifoldRing::graded_trace(int hi) const {
  ORB_CHECK(hi >= 0 && hi < group_order(), "group index out of range");
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const Permutation& h = group_[hi];
  Poly out(4 * cfg_.n + 1, 0);
  for (int gi = 0; gi < group_order(); ++gi) {
    if (element_index(compose(compose(h, group_[gi]), inverse(h))) != gi)
      continue;  // off-diagonal sector blocks contribute nothing
    const SectorGeometry& s = sector(gi);
    const auto tr = hom_trace(conjugation_hom(hi, gi));
    for (int deg = 0; deg <= s.model.top(); ++deg) {
      // A centralizing element fixes every torsion component, so the
      // component count multiplies the per-component trace.
      Rat t = tr[deg] * Rat(s.comp_count);
      ORB_CHECK(t.get_den() == 1, "sector trace is not an integer");
      out[deg + 2 * s.age] += std::int64_t(t.get_num().get_si());
    }
  }
  return out;
}

Poly OrbifoldRing::invariant_dims_molien() const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (molien_cache_) return *molien_cache_;
  Poly sum(4 * cfg_.n + 1, 0);
  for (int hi = 0; hi < group_order(); ++hi) {
    const Poly tr = graded_trace(hi);
    for (std::size_t d = 0; d < tr.size(); ++d) sum[d] += tr[d];
  }
  Poly out(sum.size(), 0);
  for (std::size_t d = 0; d < sum.size(); ++d) {
    ORB_CHECK(sum[d] >= 0 && sum[d] % group_order() == 0,
              "trace average is not a nonnegative integer");
    out[d] = sum[d] / group_order();
  }
  molien_cache_ = out;
  return out;
}

std::vector<std::uint64_t> OrbifoldRing::block_keys(int total_deg) const {
  std::vector<std::uint64_t> keys;
  for (int gi = 0; gi < group_order(); ++gi) {
    const SectorGeometry& s = sector(gi);
    const int deg = total_deg - 2 * s.age;
    if (deg < 0 || deg > s.model.top()) continue;
    for (int comp = 0; comp < s.comp_count; ++comp)
      for (int idx = 0; idx < s.model.dim(deg); ++idx)
        keys.push_back(pack_key({gi, comp, deg, idx}));
  }
  return keys;
}

std::vector<MatrixQ> OrbifoldRing::action_matrices(
    int total_deg, const std::vector<int>& his) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto keys = block_keys(total_deg);
  const int B = int(keys.size());
  std::unordered_map<std::uint64_t, int> pos;
  pos.reserve(keys.size());
  for (int i = 0; i < B; ++i) pos.emplace(keys[i], i);

  std::vector<MatrixQ> mats;
  mats.reserve(his.size());
  for (const int hi : his) {
    MatrixQ m(B, B);
    for (int col = 0; col < B; ++col) {
      const BasisKey k = unpack_key(keys[col]);
      const int ti = element_index(
          compose(compose(group_[hi], group_[k.g]), inverse(group_[hi])));
      const SectorHom& hom = conjugation_hom(hi, k.g);
      for (const auto& [iz, c] : hom.apply(k.deg, k.idx)) {
        auto it = pos.find(pack_key({ti, k.comp, k.deg, iz}));
        ORB_CHECK(it != pos.end(), "action left the degree block");
        m.at(it->second, col) = c;
      }
    }
    mats.push_back(std::move(m));
  }
  return mats;
}

std::optional<OrbifoldRing::InvariantBlock> OrbifoldRing::invariant_block(
    int total_deg, std::int64_t max_block) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto keys = block_keys(total_deg);
  if (std::int64_t(keys.size()) > max_block) return std::nullopt;
  InvariantBlock blk;
  blk.total_deg = total_deg;
  if (keys.empty()) return blk;

  const auto gens = generator_indices();
  if (gens.empty()) {  // trivial group: everything is invariant
    for (const auto key : keys) blk.basis.push_back({{key, Rat(1)}});
    blk.lead = keys;
    return blk;
  }
  std::vector<int> lead_cols;
  const auto vecs =
      invariant_basis(action_matrices(total_deg, gens), &lead_cols);
  for (std::size_t vi = 0; vi < vecs.size(); ++vi) {
    Element e;
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (vecs[vi][i] != 0) e.emplace_back(keys[i], vecs[vi][i]);
    blk.basis.push_back(std::move(e));
    blk.lead.push_back(keys[lead_cols[vi]]);
  }
  return blk;
}

std::optional<std::int64_t> OrbifoldRing::invariant_dim_projector(
    int total_deg, std::int64_t max_block) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto keys = block_keys(total_deg);
  if (std::int64_t(keys.size()) > max_block) return std::nullopt;
  if (keys.empty()) return 0;
  const int B = int(keys.size());
  MatrixQ P(B, B);
  for (int hi = 0; hi < group_order(); ++hi)
    P = P + action_matrices(total_deg, {hi})[0];
  P = P.scaled(Rat(1, group_order()));
  return rref_kernel(P).rank;
}

Poly OrbifoldRing::poincare_invariant(std::int64_t max_block) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = pinv_cache_.find(max_block);
  if (it != pinv_cache_.end()) return it->second;
  const Poly molien = invariant_dims_molien();
  Poly out(molien.size(), 0);
  for (int d = 0; d < int(molien.size()); ++d) {
    const auto blk = invariant_block(d, max_block);
    if (blk) {
      // Explicit fixed-space rank must agree with the trace average.
      ORB_CHECK(std::int64_t(blk->basis.size()) == molien[d],
                "explicit invariant rank disagrees with the trace average");
      out[d] = std::int64_t(blk->basis.size());
    } else {
      out[d] = molien[d];
    }
  }
  pinv_cache_.emplace(max_block, out);
  return out;
}

std::vector<Rat> OrbifoldRing::coords_in_block(const InvariantBlock& blk,
                                               const Element& v) const {
  std::vector<Rat> coef(blk.basis.size(), Rat(0));
  for (std::size_t j = 0; j < blk.basis.size(); ++j) {
    auto it = std::lower_bound(
        v.begin(), v.end(), blk.lead[j],
        [](const auto& p, std::uint64_t k) { return p.first < k; });
    if (it != v.end() && it->first == blk.lead[j]) coef[j] = it->second;
  }
  Element recon;
  for (std::size_t j = 0; j < blk.basis.size(); ++j)
    element_add(recon, blk.basis[j], coef[j]);
  if (!element_eq(recon, v))
    throw internal_error("element lies outside the invariant block");
  return coef;
}

// --------------------------------------------------------------------------
// structure constants

const std::vector<std::vector<std::pair<std::int64_t, Rat>>>&
OrbifoldRing::structure_constants(std::int64_t max_basis) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (sc_built_) return sc_;
  if (basis_size_ > max_basis)
    throw bound_error("structure constant table needs " +
                      std::to_string(basis_size_) + "^2 cells, limit is " +
                      std::to_string(max_basis) + "^2");
  const std::int64_t B = basis_size_;
  sc_.assign(std::size_t(B) * B, {});
  for (std::int64_t a = 0; a < B; ++a) {
    const BasisKey ka = key_of_flat(a);
    for (std::int64_t b = 0; b < B; ++b) {
      const Element e = star_basis(ka, key_of_flat(b));
      auto& row = sc_[std::size_t(a) * B + b];
      row.reserve(e.size());
      for (const auto& [k, c] : e)
        row.emplace_back(flat_of_key(unpack_key(k)), c);
    }
  }
  sc_built_ = true;
  return sc_;
}

// --------------------------------------------------------------------------
// property checks

CheckResult OrbifoldRing::check_selection_rule() const {
  CheckResult r{"selection_rule", true, ""};
  std::int64_t obstructed = 0;
  for (int gi = 0; gi < group_order() && r.pass; ++gi)
    for (int hi = 0; hi < group_order(); ++hi) {
      const PairInfo& pi = pair_info(gi, hi);
      if (pi.rank != pair_info(hi, gi).rank) {
        r.pass = false;
        r.details = "rank not symmetric at pair (" + std::to_string(gi) +
                    "," + std::to_string(hi) + ")";
        break;
      }
      // The virtual bundle is trivial, so both the K-theory gate (the
      // alternating sum of exterior powers of the dual) and the Euler-class
      // gate vanish exactly when the rank is positive.  The pushforward of
      // the fundamental class must be nonzero, so any vanishing of the
      // product of sector units is attributable to the gate alone.
      const PipelineOut p = pipeline(gi, hi, 0, 0, 0, 0);
      if (p.v.empty()) {
        r.pass = false;
        r.details = "pushforward of the join fundamental class vanished at (" +
                    std::to_string(gi) + "," + std::to_string(hi) + ")";
        break;
      }
      const Element prod = star(sector_unit(gi), sector_unit(hi));
      if (pi.rank > 0) {
        ++obstructed;
        if (!prod.empty()) {
          r.pass = false;
          r.details = "obstructed pair (" + std::to_string(gi) + "," +
                      std::to_string(hi) + ") produced a nonzero product";
          break;
        }
      } else if (prod.empty()) {
        r.pass = false;
        r.details = "unobstructed pair (" + std::to_string(gi) + "," +
                    std::to_string(hi) + ") produced a zero product";
        break;
      }
    }
  if (r.pass)
    r.details = fmt_count(std::int64_t(group_order()) * group_order(),
                          "pair") +
                ", " + fmt_count(obstructed, "obstructed pair");
  return r;
}

CheckResult OrbifoldRing::check_associativity_exhaustive(
    int degree_cut_samples, std::uint64_t seed) const {
  CheckResult r{"associativity_exhaustive", true, ""};
  const auto& sc = structure_constants();
  const std::int64_t B = basis_size_;
  const int topD = 4 * cfg_.n;

  std::vector<int> tdeg(B);
  for (std::int64_t f = 0; f < B; ++f) tdeg[f] = total_degree(key_of_flat(f));

  // Degree additivity of every table entry justifies cutting triples whose
  // combined degree exceeds the ambient top: both bracketings then vanish.
  for (std::int64_t a = 0; a < B; ++a)
    for (std::int64_t b = 0; b < B; ++b)
      for (const auto& [t, c] : sc[std::size_t(a) * B + b])
        if (tdeg[t] != tdeg[a] + tdeg[b]) {
          r.pass = false;
          r.details = "degree additivity failed at product (" +
                      std::to_string(a) + "," + std::to_string(b) + ")";
          return r;
        }

  std::vector<Rat> lhs(B, Rat(0)), rhs(B, Rat(0));
  std::vector<std::int64_t> touched;
  std::int64_t triples = 0, mismatches = 0;
  for (std::int64_t a = 0; a < B && r.pass; ++a) {
    if (tdeg[a] > topD) continue;
    for (std::int64_t b = 0; b < B && r.pass; ++b) {
      if (tdeg[a] + tdeg[b] > topD) continue;
      const auto& ab = sc[std::size_t(a) * B + b];
      for (std::int64_t c = 0; c < B; ++c) {
        if (tdeg[a] + tdeg[b] + tdeg[c] > topD) continue;
        ++triples;
        touched.clear();
        for (const auto& [t, ct] : ab)
          for (const auto& [u, cu] : sc[std::size_t(t) * B + c]) {
            if (lhs[u] == 0 && rhs[u] == 0) touched.push_back(u);
            lhs[u] += ct * cu;
          }
        for (const auto& [s, cs] : sc[std::size_t(b) * B + c])
          for (const auto& [u, cu] : sc[std::size_t(a) * B + s]) {
            if (lhs[u] == 0 && rhs[u] == 0) touched.push_back(u);
            rhs[u] += cs * cu;
          }
        for (const auto u : touched) {
          if (lhs[u] != rhs[u] && mismatches++ == 0) {
            r.pass = false;
            r.details = "first mismatch at triple (" + std::to_string(a) +
                        "," + std::to_string(b) + "," + std::to_string(c) +
                        ")";
          }
          lhs[u] = 0;
          rhs[u] = 0;
        }
        if (!r.pass) break;
      }
    }
  }
  if (!r.pass) return r;

  // Sampled triples beyond the cut: both bracketings must be empty.
  std::mt19937_64 rng(seed);
  std::int64_t beyond = 0;
  for (int s = 0; s < degree_cut_samples; ++s) {
    std::int64_t a = std::int64_t(rng() % std::uint64_t(B));
    std::int64_t b = std::int64_t(rng() % std::uint64_t(B));
    std::int64_t c = std::int64_t(rng() % std::uint64_t(B));
    if (tdeg[a] + tdeg[b] + tdeg[c] <= topD) continue;
    ++beyond;
    bool zero = true;
    for (const auto& [t, ct] : sc[std::size_t(a) * B + b])
      if (!sc[std::size_t(t) * B + c].empty()) zero = false;
    for (const auto& [s2, cs] : sc[std::size_t(b) * B + c])
      if (!sc[std::size_t(a) * B + s2].empty()) zero = false;
    if (!zero) {
      r.pass = false;
      r.details = "triple beyond the degree cut had a nonzero bracketing";
      return r;
    }
  }
  r.details = fmt_count(triples, "triple") + " within the degree cut, " +
              fmt_count(beyond, "sampled triple") + " beyond it";
  return r;
}

CheckResult OrbifoldRing::check_associativity_random(
    int count, std::uint64_t seed) const {
  CheckResult r{"associativity_random", true, ""};
  std::mt19937_64 rng(seed);
  const int topD = 4 * cfg_.n;
  std::int64_t nonzero = 0;
  for (int it = 0; it < count; ++it) {
    std::int64_t a, b, c;
    int guard = 0;
    do {
      a = std::int64_t(rng() % std::uint64_t(basis_size_));
      b = std::int64_t(rng() % std::uint64_t(basis_size_));
      c = std::int64_t(rng() % std::uint64_t(basis_size_));
      ORB_CHECK(++guard < 10000, "could not sample a triple within degree");
    } while (total_degree(key_of_flat(a)) + total_degree(key_of_flat(b)) +
                 total_degree(key_of_flat(c)) >
             topD);
    const BasisKey ka = key_of_flat(a), kb = key_of_flat(b),
                   kc = key_of_flat(c);
    const Element ec{{pack_key(kc), Rat(1)}}, ea{{pack_key(ka), Rat(1)}};
    const Element l = star(star_basis(ka, kb), ec);
    const Element rr = star(ea, star_basis(kb, kc));
    if (!element_eq(l, rr)) {
      r.pass = false;
      r.details = "mismatch at triple (" + key_label(ka) + ") (" +
                  key_label(kb) + ") (" + key_label(kc) + ")";
      return r;
    }
    if (!l.empty()) ++nonzero;
  }
  r.details = fmt_count(count, "sampled triple") + ", " +
              fmt_count(nonzero, "nonzero instance");
  return r;
}

CheckResult OrbifoldRing::check_unit(std::int64_t max_exhaustive, int samples,
                                     std::uint64_t seed) const {
  CheckResult r{"unit", true, ""};
  const Element u = unit();
  auto probe = [&](std::int64_t flat) {
    const BasisKey k = key_of_flat(flat);
    const Element e{{pack_key(k), Rat(1)}};
    if (!element_eq(star(u, e), e) || !element_eq(star(e, u), e)) {
      r.pass = false;
      r.details = "unit law failed at " + key_label(k);
      return false;
    }
    return true;
  };
  std::int64_t count = 0;
  if (basis_size_ <= max_exhaustive) {
    for (std::int64_t f = 0; f < basis_size_; ++f, ++count)
      if (!probe(f)) return r;
    r.details = "exhaustive over " + fmt_count(count, "basis element");
  } else {
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s, ++count)
      if (!probe(std::int64_t(rng() % std::uint64_t(basis_size_)))) return r;
    r.details = fmt_count(count, "sampled basis element");
  }
  return r;
}

CheckResult OrbifoldRing::check_g_equivariance(std::int64_t max_exhaustive,
                                               int samples,
                                               std::uint64_t seed) const {
  CheckResult r{"g_equivariance", true, ""};
  auto probe = [&](int hi, std::int64_t a, std::int64_t b) {
    const BasisKey ka = key_of_flat(a), kb = key_of_flat(b);
    const Element ea{{pack_key(ka), Rat(1)}}, eb{{pack_key(kb), Rat(1)}};
    const Element l = g_action(hi, star_basis(ka, kb));
    const Element rr = star(g_action(hi, ea), g_action(hi, eb));
    if (!element_eq(l, rr)) {
      r.pass = false;
      r.details = "conjugation is not multiplicative at h=" +
                  print_cycles(group_[hi]) + ", a=" + key_label(ka) +
                  ", b=" + key_label(kb);
      return false;
    }
    return true;
  };
  const std::int64_t total =
      std::int64_t(group_order()) * basis_size_ * basis_size_;
  if (total <= max_exhaustive) {
    for (int hi = 0; hi < group_order(); ++hi)
      for (std::int64_t a = 0; a < basis_size_; ++a)
        for (std::int64_t b = 0; b < basis_size_; ++b)
          if (!probe(hi, a, b)) return r;
    r.details = "exhaustive over " + fmt_count(total, "triple");
  } else {
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s)
      if (!probe(int(rng() % std::uint64_t(group_order())),
                 std::int64_t(rng() % std::uint64_t(basis_size_)),
                 std::int64_t(rng() % std::uint64_t(basis_size_))))
        return r;
    r.details = fmt_count(samples, "sampled triple");
  }
  return r;
}

CheckResult OrbifoldRing::check_g_action_group_hom(int samples,
                                                   std::uint64_t seed) const {
  CheckResult r{"g_action_group_hom", true, ""};
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const int h1 = int(rng() % std::uint64_t(group_order()));
    const int h2 = int(rng() % std::uint64_t(group_order()));
    const std::int64_t a = std::int64_t(rng() % std::uint64_t(basis_size_));
    const Element e{{pack_key(key_of_flat(a)), Rat(1)}};
    const int h12 = element_index(compose(group_[h1], group_[h2]));
    if (!element_eq(g_action(h12, e), g_action(h1, g_action(h2, e))) ||
        !element_eq(g_action(0, e), e)) {
      r.pass = false;
      r.details = "composition law failed at h1=" + print_cycles(group_[h1]) +
                  ", h2=" + print_cycles(group_[h2]);
      return r;
    }
  }
  r.details = fmt_count(samples, "sampled pair");
  return r;
}

namespace {

// Invariant blocks small enough to sample from, across all total degrees.
std::vector<OrbifoldRing::InvariantBlock> small_blocks(const OrbifoldRing& R,
                                                       std::int64_t cap) {
  std::vector<OrbifoldRing::InvariantBlock> out;
  for (int d = 0; d <= 4 * R.config().n; ++d) {
    auto blk = R.invariant_block(d, cap);
    if (blk && !blk->basis.empty()) out.push_back(std::move(*blk));
  }
  return out;
}

}  // namespace

CheckResult OrbifoldRing::check_invariant_commutativity(
    int samples, std::uint64_t seed) const {
  CheckResult r{"invariant_commutativity", true, ""};
  const auto blocks = small_blocks(*this, 256);
  if (blocks.empty()) {
    r.details = "no invariant blocks within the size cap";
    return r;
  }
  std::mt19937_64 rng(seed);
  std::int64_t nonzero = 0;
  for (int s = 0; s < samples; ++s) {
    const auto& b1 = blocks[rng() % blocks.size()];
    const auto& b2 = blocks[rng() % blocks.size()];
    const Element& a = b1.basis[rng() % b1.basis.size()];
    const Element& b = b2.basis[rng() % b2.basis.size()];
    const Element ab = star(a, b);
    Element ba = star(b, a);
    const int sign = (b1.total_deg % 2) && (b2.total_deg % 2) ? -1 : 1;
    Element diff = ab;
    element_add(diff, ba, Rat(-sign));
    if (!diff.empty()) {
      r.pass = false;
      r.details = "invariants of degrees " + std::to_string(b1.total_deg) +
                  " and " + std::to_string(b2.total_deg) +
                  " do not graded-commute";
      return r;
    }
    if (!ab.empty()) ++nonzero;
  }
  r.details = fmt_count(samples, "sampled pair") + " over " +
              fmt_count(std::int64_t(blocks.size()), "block") + ", " +
              fmt_count(nonzero, "nonzero product");
  return r;
}

CheckResult OrbifoldRing::check_degree_additivity(int samples,
                                                  std::uint64_t seed) const {
  CheckResult r{"degree_additivity", true, ""};
  std::mt19937_64 rng(seed);
  std::int64_t nonzero = 0;
  for (int s = 0; s < samples; ++s) {
    const BasisKey a = key_of_flat(std::int64_t(rng() % std::uint64_t(basis_size_)));
    const BasisKey b = key_of_flat(std::int64_t(rng() % std::uint64_t(basis_size_)));
    const Element p = star_basis(a, b);
    if (p.empty()) continue;
    ++nonzero;
    int d = -1;
    try {
      d = element_total_degree(p);
    } catch (const input_error&) {
      r.pass = false;
      r.details = "inhomogeneous product at " + key_label(a) + " * " +
                  key_label(b);
      return r;
    }
    if (d != total_degree(a) + total_degree(b)) {
      r.pass = false;
      r.details = "degree dropped at " + key_label(a) + " * " + key_label(b);
      return r;
    }
  }
  r.details = fmt_count(samples, "sampled pair") + ", " +
              fmt_count(nonzero, "nonzero product");
  return r;
}

CheckResult OrbifoldRing::check_duality(std::uint64_t seed) const {
  CheckResult r{"duality", true, ""};
  const int topD = 4 * cfg_.n;
  const Poly pt = poincare_total();
  if (int(pt.size()) != topD + 1 || !poly_palindromic(pt)) {
    r.pass = false;
    r.details = "total Poincare polynomial is not palindromic of degree " +
                std::to_string(topD);
    return r;
  }

  // The pairing <a, b> = coefficient of the top class of the untwisted
  // sector in a * b.  Against the inverse sector, every basis monomial
  // pairs to +-1 with its model dual on the same component and to 0 with
  // everything else, so the pairing matrix is a signed permutation.
  const BasisKey top_key{0, 0, sector(0).model.top(), 0};
  const std::uint64_t top_packed = pack_key(top_key);
  ORB_CHECK(sector(0).model.dim(sector(0).model.top()) == 1,
            "untwisted top degree is not one-dimensional");

  std::int64_t checked = 0;
  for (int gi = 0; gi < group_order(); ++gi) {
    const int gii = element_index(inverse(group_[gi]));
    const SectorGeometry& s = sector(gi);
    const Rat dts((dt_ && pair_info(gi, gii).eps % 2) ? -1 : 1);
    for (int deg = 0; deg <= s.model.top(); ++deg)
      for (int idx = 0; idx < s.model.dim(deg); ++idx) {
        const auto [pidx, psign] = s.model.dual(deg, idx);
        for (int comp = 0; comp < s.comp_count; ++comp) {
          const Element p = star_basis({gi, comp, deg, idx},
                                       {gii, comp, s.model.top() - deg, pidx});
          const Rat want = Rat(psign) * dts;
          if (p.size() != 1 || p[0].first != top_packed ||
              p[0].second != want) {
            r.pass = false;
            r.details = "dual pairing failed at " +
                        key_label({gi, comp, deg, idx});
            return r;
          }
          ++checked;
        }
      }
  }

  // Sampled off-diagonal pairings must be zero.
  std::mt19937_64 rng(seed);
  for (int s2 = 0; s2 < 2000; ++s2) {
    const BasisKey a = key_of_flat(std::int64_t(rng() % std::uint64_t(basis_size_)));
    const SectorGeometry& sa = sector(a.g);
    const int gii = element_index(inverse(group_[a.g]));
    const auto [pidx, psign] = sa.model.dual(a.deg, a.idx);
    (void)psign;
    const SectorGeometry& sb = sector(gii);
    const int bdeg = sa.model.top() - a.deg;
    BasisKey b{gii, int(rng() % std::uint64_t(sb.comp_count)), bdeg,
               int(rng() % std::uint64_t(sb.model.dim(bdeg)))};
    if (b.comp == a.comp && b.idx == pidx) continue;  // the dual partner
    Element p = star_basis(a, b);
    // Only the untwisted top coefficient constitutes the pairing.
    Rat coeff(0);
    for (const auto& [k, c] : p)
      if (k == top_packed) coeff = c;
    if (coeff != 0) {
      r.pass = false;
      r.details = "off-diagonal pairing is nonzero at " + key_label(a) +
                  " vs " + key_label(b);
      return r;
    }
  }
  r.details = fmt_count(checked, "dual pair") + " hit the top class at +-1";
  return r;
}

CheckResult OrbifoldRing::check_projection_formula(int samples,
                                                   std::uint64_t seed) const {
  CheckResult r{"projection_formula", true, ""};
  std::lock_guard<std::recursive_mutex> lk(mu_);
  // Make sure every join partition is registered, then collect the
  // inclusion pairs (source partition, coarser join).
  for (int gi = 0; gi < group_order(); ++gi)
    for (int hi = 0; hi < group_order(); ++hi) pair_info(gi, hi);
  std::vector<std::pair<int, int>> pairs;  // (finer tp, coarser jp)
  for (int tp = 0; tp < int(sectors_.size()); ++tp)
    for (int jp = 0; jp < int(sectors_.size()); ++jp)
      if (coarsens(sectors_[jp]->part, sectors_[tp]->part))
        pairs.emplace_back(tp, jp);

  std::mt19937_64 rng(seed);
  std::int64_t nonzero = 0;
  for (int s = 0; s < samples; ++s) {
    const auto [tp, jp] = pairs[rng() % pairs.size()];
    const Algebra& A = sectors_[jp]->model;
    const Algebra& B = sectors_[tp]->model;
    const int cod2 = B.top() - A.top();
    const int dx = int(rng() % std::uint64_t(A.top() + 1));
    const int ix = int(rng() % std::uint64_t(A.dim(dx)));
    const int dy = int(rng() % std::uint64_t(B.top() + 1));
    const int iy = int(rng() % std::uint64_t(B.dim(dy)));
    const SparseVec x{{ix, Rat(1)}}, y{{iy, Rat(1)}};

    const SectorHom& pull = restriction_hom(tp, jp);
    const SparseVec ry = pull.apply(dy, iy);
    const SparseVec lhs =
        gysin_apply(jp, tp, dx + dy, A.mul_vec(dx, x, dy, ry));
    const SparseVec rhs =
        B.mul_vec(dx + cod2, gysin_apply(jp, tp, dx, x), dy, y);
    if (!sparse_eq(lhs, rhs)) {
      r.pass = false;
      r.details = "pushforward is not a module map for partition pair (" +
                  sectors_[tp]->part.str() + ", " + sectors_[jp]->part.str() +
                  ")";
      return r;
    }
    if (!lhs.empty()) ++nonzero;
  }
  r.details = fmt_count(samples, "sampled instance") + " over " +
              fmt_count(std::int64_t(pairs.size()), "inclusion") + ", " +
              fmt_count(nonzero, "nonzero case");
  return r;
}

CheckResult OrbifoldRing::check_restriction_multiplicative(
    int samples, std::uint64_t seed) const {
  CheckResult r{"restriction_multiplicative", true, ""};
  std::lock_guard<std::recursive_mutex> lk(mu_);
  for (int gi = 0; gi < group_order(); ++gi)
    for (int hi = 0; hi < group_order(); ++hi) pair_info(gi, hi);
  std::vector<std::pair<int, int>> pairs;
  for (int sp = 0; sp < int(sectors_.size()); ++sp)
    for (int dp = 0; dp < int(sectors_.size()); ++dp)
      if (coarsens(sectors_[dp]->part, sectors_[sp]->part))
        pairs.emplace_back(sp, dp);

  std::mt19937_64 rng(seed);
  std::int64_t nonzero = 0;
  for (int s = 0; s < samples; ++s) {
    const auto [sp, dp] = pairs[rng() % pairs.size()];
    const Algebra& A = sectors_[sp]->model;
    const Algebra& B = sectors_[dp]->model;
    const SectorHom& pull = restriction_hom(sp, dp);
    if (!sparse_eq(pull.apply(0, 0), {{0, Rat(1)}})) {
      r.pass = false;
      r.details = "restriction does not fix the unit";
      return r;
    }
    const int dx = int(rng() % std::uint64_t(A.top() + 1));
    const int ix = int(rng() % std::uint64_t(A.dim(dx)));
    const int dy = int(rng() % std::uint64_t(A.top() + 1));
    const int iy = int(rng() % std::uint64_t(A.dim(dy)));
    const SparseVec prod = A.mul(dx, ix, dy, iy);
    const SparseVec lhs = pull.apply_vec(dx + dy, prod);
    const SparseVec rhs =
        B.mul_vec(dx, pull.apply(dx, ix), dy, pull.apply(dy, iy));
    if (!sparse_eq(lhs, rhs)) {
      r.pass = false;
      r.details = "restriction is not multiplicative for partition pair (" +
                  sectors_[sp]->part.str() + ", " + sectors_[dp]->part.str() +
                  ")";
      return r;
    }
    if (!lhs.empty()) ++nonzero;
  }
  r.details = fmt_count(samples, "sampled instance") + ", " +
              fmt_count(nonzero, "nonzero case");
  return r;
}

CheckResult OrbifoldRing::check_invariant_closure(int samples,
                                                  std::uint64_t seed) const {
  CheckResult r{"invariant_closure", true, ""};
  const std::int64_t cap = 256;
  const auto blocks = small_blocks(*this, cap);
  if (blocks.empty()) {
    r.details = "no invariant blocks within the size cap";
    return r;
  }
  std::unordered_map<int, std::size_t> by_deg;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    by_deg.emplace(blocks[i].total_deg, i);
  const auto gens = generator_indices();

  std::mt19937_64 rng(seed);
  std::int64_t nonzero = 0, expanded = 0;
  for (int s = 0; s < samples; ++s) {
    const auto& b1 = blocks[rng() % blocks.size()];
    const auto& b2 = blocks[rng() % blocks.size()];
    const Element& a = b1.basis[rng() % b1.basis.size()];
    const Element& b = b2.basis[rng() % b2.basis.size()];
    const Element c = star(a, b);
    for (const int hi : gens)
      if (!element_eq(g_action(hi, c), c)) {
        r.pass = false;
        r.details = "product of invariants is not invariant (degrees " +
                    std::to_string(b1.total_deg) + ", " +
                    std::to_string(b2.total_deg) + ")";
        return r;
      }
    if (!c.empty()) ++nonzero;
    const int d3 = b1.total_deg + b2.total_deg;
    auto it = by_deg.find(d3);
    if (it != by_deg.end()) {
      try {
        coords_in_block(blocks[it->second], c);
        ++expanded;
      } catch (const internal_error&) {
        r.pass = false;
        r.details = "product escaped the invariant block in degree " +
                    std::to_string(d3);
        return r;
      }
    }
  }
  r.details = fmt_count(samples, "sampled pair") + ", " +
              fmt_count(nonzero, "nonzero product") + ", " +
              fmt_count(expanded, "expansion") + " in block coordinates";
  return r;
}

CheckResult OrbifoldRing::check_class_regrouping() const {
  CheckResult r{"class_regrouping", true, ""};
  const Poly lhs = invariant_dims_molien();

  Poly rhs(4 * cfg_.n + 1, 0);
  const int N = cfg_.group_degree();
  for (const auto& cd : conjugacy_class_data(N)) {
    // Canonical representative: cycles laid out consecutively.
    Permutation rep;
    rep.img.resize(N);
    int at = 0;
    for (const int part : cd.type.parts) {
      for (int i = 0; i < part; ++i) rep.img[at + i] = at + (i + 1) % part;
      at += part;
    }
    const int gi = element_index(rep);
    const auto cent = centralizer(rep, group_);
    ORB_CHECK(cent.size() == cd.centralizer_order,
              "centralizer order disagrees with the class data");
    const SectorGeometry& s = sector(gi);
    std::vector<Rat> acc(s.model.top() + 1, Rat(0));
    for (const auto& h : cent) {
      const auto tr = hom_trace(conjugation_hom(element_index(h), gi));
      for (std::size_t d = 0; d < tr.size(); ++d) acc[d] += tr[d];
    }
    for (int deg = 0; deg <= s.model.top(); ++deg) {
      Rat t = acc[deg] * rat_frac(s.comp_count, std::int64_t(cent.size()));
      ORB_CHECK(t.get_den() == 1, "class-averaged trace is not an integer");
      rhs[deg + 2 * s.age] += std::int64_t(t.get_num().get_si());
    }
  }
  if (poly_trim(lhs) != poly_trim(rhs)) {
    r.pass = false;
    r.details = "per-class regrouping disagrees with the group average: " +
                poly_str(lhs) + " vs " + poly_str(rhs);
    return r;
  }
  r.details = "per-class centralizer averages match the group average";
  return r;
}

// --------------------------------------------------------------------------
// standalone checks

CheckResult check_epsilon_cocycle(const CaseConfig& cfg,
                                  std::int64_t max_exhaustive_triples,
                                  int samples, std::uint64_t seed) {
  CheckResult r{"epsilon_cocycle", true, ""};
  cfg.validate();
  const int N = cfg.group_degree();
  const auto group = all_permutations(N);
  const int G = int(group.size());

  std::vector<int> ages(G);
  for (int i = 0; i < G; ++i) ages[i] = age(cfg, group[i]);

  auto index_of = [&](const Permutation& p) {
    auto it = std::lower_bound(group.begin(), group.end(), p);
    ORB_CHECK(it != group.end() && *it == p, "closure failure");
    return int(it - group.begin());
  };
  std::vector<int> mul(std::size_t(G) * G);
  for (int a = 0; a < G; ++a)
    for (int b = 0; b < G; ++b)
      mul[std::size_t(a) * G + b] = index_of(compose(group[a], group[b]));

  std::vector<int> eps(std::size_t(G) * G);
  for (int a = 0; a < G; ++a)
    for (int b = 0; b < G; ++b) {
      const int defect = ages[a] + ages[b] - ages[mul[std::size_t(a) * G + b]];
      if (defect % 2 != 0) {
        r.pass = false;
        r.details = "age defect is odd at (" + print_cycles(group[a]) + ", " +
                    print_cycles(group[b]) + ")";
        return r;
      }
      eps[std::size_t(a) * G + b] = defect / 2;
    }

  auto cocycle = [&](int a, int b, int c) {
    const int ab = mul[std::size_t(a) * G + b];
    const int bc = mul[std::size_t(b) * G + c];
    return eps[std::size_t(a) * G + b] + eps[std::size_t(ab) * G + c] ==
           eps[std::size_t(a) * G + bc] + eps[std::size_t(b) * G + c];
  };

  const std::int64_t total = std::int64_t(G) * G * G;
  if (total <= max_exhaustive_triples) {
    for (int a = 0; a < G; ++a)
      for (int b = 0; b < G; ++b)
        for (int c = 0; c < G; ++c)
          if (!cocycle(a, b, c)) {
            r.pass = false;
            r.details = "cocycle identity failed at (" +
                        print_cycles(group[a]) + ", " + print_cycles(group[b]) +
                        ", " + print_cycles(group[c]) + ")";
            return r;
          }
    r.details = "exhaustive over " + fmt_count(total, "triple") +
                ", all exponents integral";
  } else {
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s) {
      const int a = int(rng() % std::uint64_t(G));
      const int b = int(rng() % std::uint64_t(G));
      const int c = int(rng() % std::uint64_t(G));
      if (!cocycle(a, b, c)) {
        r.pass = false;
        r.details = "cocycle identity failed at a sampled triple";
        return r;
      }
    }
    r.details = fmt_count(samples, "sampled triple") +
                ", all exponents integral";
  }
  return r;
}

namespace {

// Flattening projection for the cross-case comparison: a monomial of the
// power-of-the-surface sector model maps to the weight-quotient model by
// wedging the projections of its generators (the two models share the
// ambient generator layout 4 * block + letter).
class FlatProj {
 public:
  FlatProj(const Algebra* src, const SectorGeometry* dst)
      : src_(src), dst_(dst) {}

  const SparseVec& image(int deg, int idx) {
    const std::uint64_t key = (std::uint64_t(deg) << 32) | std::uint64_t(idx);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<SparseVec> ones;
    const auto parts = src_->tensor_parts(deg, idx);
    for (std::size_t f = 0; f < parts.size(); ++f)
      for (const int j : src_->factor(int(f)).exterior_tuple(parts[f].first,
                                                             parts[f].second))
        ones.push_back(dst_->proj1[4 * int(f) + j]);
    return memo_.emplace(key, dst_->model.wedge(ones)).first->second;
  }

  SparseVec image_vec(int deg, const SparseVec& v) {
    SparseVec out;
    for (const auto& [i, c] : v) sparse_add(out, image(deg, i), c);
    return out;
  }

 private:
  const Algebra* src_;
  const SectorGeometry* dst_;
  std::unordered_map<std::uint64_t, SparseVec> memo_;
};

}  // namespace

CheckResult restriction_ring_hom_check(int n, bool dt, int beyond_samples,
                                       std::uint64_t seed,
                                       const RingBounds& bounds) {
  CheckResult r{"restriction_ring_hom", true, ""};
  CaseConfig ca;
  ca.kind = CaseKind::HilbA;
  ca.n = n + 1;
  CaseConfig cb;
  cb.kind = CaseKind::KummerB;
  cb.n = n;
  const OrbifoldRing RA(ca, dt, bounds);
  const OrbifoldRing RB(cb, dt, bounds);
  const int G = RA.group_order();
  ORB_CHECK(G == RB.group_order(), "acting groups differ");
  const int topD = 4 * n;  // ambient top degree on the quotient side

  // Per-partition projections, keyed by the A-ring partition id.  The two
  // rings register partitions in the same order, but joins show up lazily,
  // so the B-side counterpart is located through its own partition table.
  std::map<int, std::unique_ptr<FlatProj>> proj;
  auto proj_at = [&](int apid, const SectorGeometry& sa,
                     const SectorGeometry& sb) -> FlatProj& {
    auto it = proj.find(apid);
    if (it == proj.end())
      it = proj.emplace(apid, std::make_unique<FlatProj>(&sa.model, &sb))
               .first;
    return *it->second;
  };
  auto proj_of = [&](int gi) -> FlatProj& {
    return proj_at(RA.part_of_g_[gi], RA.sector(gi), RB.sector(gi));
  };

  // F of a full element: spread the projected class over every torsion
  // component of the target sector.
  auto F = [&](const Element& a) {
    Element out;
    for (const auto& [k, c] : a) {
      const BasisKey u = unpack_key(k);
      const SparseVec img = proj_of(u.g).image(u.deg, u.idx);
      const SectorGeometry& sb = RB.sector(u.g);
      Element part;
      for (int comp = 0; comp < sb.comp_count; ++comp)
        for (const auto& [iz, cz] : img)
          part.emplace_back(pack_key({u.g, comp, u.deg, iz}), cz);
      std::sort(part.begin(), part.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      element_add(out, part, c);
    }
    return out;
  };

  std::int64_t pairs_checked = 0, obstructed = 0, nonzero = 0;
  std::mt19937_64 rng(seed);
  std::int64_t full_paths = 0;

  for (int gi = 0; gi < G && r.pass; ++gi) {
    ORB_CHECK(RA.sector(gi).part == RB.sector(gi).part,
              "sector partitions differ between the cases");
    ORB_CHECK(RA.sector(gi).age == RB.sector(gi).age, "sector ages differ");
    for (int hi = 0; hi < G && r.pass; ++hi) {
      const PairInfo& pa = RA.pair_info(gi, hi);
      const PairInfo& pb = RB.pair_info(gi, hi);
      ORB_CHECK(pa.ghi == pb.ghi && pa.eps == pb.eps,
                "pair bookkeeping differs between the cases");
      if (pa.rank != pb.rank) {
        r.pass = false;
        r.details = "obstruction ranks differ at pair (" +
                    print_cycles(RA.group_element(gi)) + ", " +
                    print_cycles(RA.group_element(hi)) + ")";
        break;
      }
      if (pa.rank > 0) {
        ++obstructed;
        continue;
      }

      ORB_CHECK(pa.codim == pb.codim, "excess codimensions differ");
      const SectorGeometry& sja = RA.sector_by_part(pa.jpart);
      const SectorGeometry& sjb = RB.sector_by_part(pb.jpart);
      ORB_CHECK(sja.part == sjb.part, "join partitions differ");
      const SectorGeometry& stb = RB.sector(pa.ghi);
      // Summing the component-matching counts over all source component
      // pairs spreads the product uniformly: each join component decides
      // both source labels, so every target component receives exactly the
      // number of join components lying over it.
      const std::int64_t ratio = sjb.d / stb.d;
      const Rat mult(ratio * ratio * ratio * ratio);

      const SectorHom& raA = RA.restriction_hom(RA.part_of_g_[gi], pa.jpart);
      const SectorHom& rbA = RA.restriction_hom(RA.part_of_g_[hi], pa.jpart);
      const SectorHom& raB = RB.restriction_hom(RB.part_of_g_[gi], pb.jpart);
      const SectorHom& rbB = RB.restriction_hom(RB.part_of_g_[hi], pb.jpart);
      FlatProj& projG = proj_of(gi);
      FlatProj& projH = proj_of(hi);
      FlatProj& projT = proj_of(pa.ghi);

      const Algebra& MA = RA.sector(gi).model;
      const Algebra& MB = RA.sector(hi).model;
      const int agA = 2 * RA.sector(gi).age, agB = 2 * RA.sector(hi).age;

      for (int da = 0; da <= MA.top() && r.pass; ++da) {
        if (da + agA > topD) break;
        for (int db = 0; db <= MB.top() && r.pass; ++db) {
          if (da + agA + db + agB > topD) break;
          for (int ia = 0; ia < MA.dim(da); ++ia) {
            const SparseVec& va = raA.apply(da, ia);
            const SparseVec pja = raB.apply_vec(da, projG.image(da, ia));
            for (int ib = 0; ib < MB.dim(db); ++ib) {
              ++pairs_checked;
              // Surface-power side first, projected after the pushforward.
              const SparseVec& vb = rbA.apply(db, ib);
              SparseVec lhs;
              if (!va.empty() && !vb.empty()) {
                const SparseVec prod = sja.model.mul_vec(da, va, db, vb);
                if (!prod.empty())
                  lhs = projT.image_vec(
                      da + db + 2 * pa.codim,
                      RA.gysin_apply(pa.jpart, RA.part_of_g_[pa.ghi],
                                     da + db, prod));
              }
              // Quotient side: project at the sectors, then push forward.
              SparseVec rhs;
              const SparseVec pjb = rbB.apply_vec(db, projH.image(db, ib));
              if (!pja.empty() && !pjb.empty()) {
                const SparseVec prodB = sjb.model.mul_vec(da, pja, db, pjb);
                if (!prodB.empty()) {
                  rhs = RB.gysin_apply(pb.jpart, RB.part_of_g_[pb.ghi],
                                       da + db, prodB);
                  for (auto& [i, c] : rhs) c *= mult;
                }
              }
              if (!sparse_eq(lhs, rhs)) {
                r.pass = false;
                r.details =
                    "flattening is not multiplicative at (" +
                    print_cycles(RA.group_element(gi)) + ", " +
                    print_cycles(RA.group_element(hi)) + "), degrees (" +
                    std::to_string(da) + ", " + std::to_string(db) + ")";
                break;
              }
              if (!lhs.empty()) ++nonzero;
            }
            if (!r.pass) break;
          }
        }
      }
    }
  }
  if (!r.pass) return r;

  // Unit goes to unit.
  if (!element_eq(F(RA.unit()), RB.unit())) {
    r.pass = false;
    r.details = "the unit does not map to the unit";
    return r;
  }

  // Sampled full-element instances, exercising the component bookkeeping
  // end to end (in-cut), plus samples beyond the cut which must vanish.
  const int full_target = 400;
  int guard = 0;
  while (full_paths < full_target && guard++ < 100000) {
    const std::int64_t a =
        std::int64_t(rng() % std::uint64_t(RA.basis_size()));
    const std::int64_t b =
        std::int64_t(rng() % std::uint64_t(RA.basis_size()));
    const BasisKey ka = RA.key_of_flat(a), kb = RA.key_of_flat(b);
    if (RA.total_degree(ka) + RA.total_degree(kb) > topD) continue;
    const Element ea{{pack_key(ka), Rat(1)}}, eb{{pack_key(kb), Rat(1)}};
    if (!element_eq(F(RA.star(ea, eb)), RB.star(F(ea), F(eb)))) {
      r.pass = false;
      r.details = "element-level comparison failed at " + RA.key_label(ka) +
                  " * " + RA.key_label(kb);
      return r;
    }
    ++full_paths;
  }

  std::int64_t beyond = 0;
  guard = 0;
  while (beyond < beyond_samples && guard++ < 100000) {
    const std::int64_t a =
        std::int64_t(rng() % std::uint64_t(RA.basis_size()));
    const std::int64_t b =
        std::int64_t(rng() % std::uint64_t(RA.basis_size()));
    const BasisKey ka = RA.key_of_flat(a), kb = RA.key_of_flat(b);
    if (RA.total_degree(ka) + RA.total_degree(kb) <= topD) continue;
    const Element ea{{pack_key(ka), Rat(1)}}, eb{{pack_key(kb), Rat(1)}};
    if (!F(RA.star(ea, eb)).empty() || !RB.star(F(ea), F(eb)).empty()) {
      r.pass = false;
      r.details = "image beyond the quotient top degree is nonzero";
      return r;
    }
    ++beyond;
  }

  r.details = fmt_count(pairs_checked, "basis pair") + " within the cut, " +
              fmt_count(obstructed, "obstructed sector pair") + ", " +
              fmt_count(nonzero, "nonzero product") + ", " +
              fmt_count(full_paths, "element-level sample") + ", " +
              fmt_count(beyond, "sample") + " beyond the cut";
  return r;
}

}  // namespace orbring
