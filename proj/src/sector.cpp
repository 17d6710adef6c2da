#include "orbring/sector.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <utility>

#include "orbring/exact_linalg.hpp"

namespace orbring {

int SectorGeometry::comp_pack(const std::array<int, 4>& tau) const {
  int idx = 0;
  for (int j = 3; j >= 0; --j) {
    ORB_CHECK(0 <= tau[j] && tau[j] < d, "component label out of range");
    idx = idx * d + tau[j];
  }
  return idx;
}

std::array<int, 4> SectorGeometry::comp_unpack(int idx) const {
  ORB_CHECK(0 <= idx && idx < comp_count, "component index out of range");
  std::array<int, 4> tau{};
  for (int j = 0; j < 4; ++j) {
    tau[j] = idx % d;
    idx /= d;
  }
  return tau;
}

int SectorGeometry::comp_project(int idx, const SectorGeometry& coarse) const {
  ORB_CHECK(d % coarse.d == 0, "component projection needs divisible gcds");
  auto tau = comp_unpack(idx);
  std::array<int, 4> red{};
  for (int j = 0; j < 4; ++j) red[j] = tau[j] % coarse.d;
  return coarse.comp_pack(red);
}

namespace {

Algebra base_model(const CaseConfig& cfg) {
  if (cfg.abelian_base()) return Algebra::exterior(4);
  return Algebra::surface(cfg.base_betti);
}

}  // namespace

SectorGeometry build_sector(const CaseConfig& cfg, const SetPartition& part) {
  cfg.validate();
  if (part.n != cfg.group_degree())
    throw input_error("partition does not match the group degree");
  SectorGeometry s;
  s.cfg = cfg;
  s.part = part;
  s.sizes = part.block_sizes();
  s.l = static_cast<int>(part.blocks.size());
  s.age = cfg.group_degree() - s.l;

  if (cfg.kind == CaseKind::HilbA) {
    s.d = 1;
    s.comp_count = 1;
    s.dimC = 2 * s.l;
    std::vector<Algebra> factors(s.l, base_model(cfg));
    s.model = s.l > 0 ? Algebra::tensor(factors) : Algebra::exterior(0);
    return s;
  }

  // Case B.  Requires the abelian base (the kernel construction needs a
  // group law); CaseConfig::validate enforces this.
  s.d = 0;
  for (int sz : s.sizes) s.d = s.d == 0 ? sz : std::gcd(s.d, sz);
  s.comp_count = s.d * s.d * s.d * s.d;
  s.dimC = 2 * (s.l - 1);

  // H^1 of a component is the dual of the kernel lattice
  //   L = { v in Z^l : sum_i s_i v_i = 0 },
  // tensored with the four letters of the base surface, i.e. the quotient
  // of the ambient letter block Z^l by the primitive weight vector
  // w = (s_1/d, ..., s_l/d).  The model generators must be an *integral*
  // basis of that quotient: the component is canonically L (x) A, so the
  // top wedge of an integral basis integrates to exactly +1 (per-letter
  // base changes enter to the fourth power, so orientation is automatic),
  // and the pairing-adjoint pushforward below depends on that scale.
  std::vector<std::vector<std::int64_t>> qcoord(s.l);  // e_i in the basis
  std::vector<std::vector<std::int64_t>> lift(s.l - 1);  // basis rep in Z^l
  std::vector<std::string> kept_name(std::max(s.l - 1, 0));
  int pivot = -1;
  for (int i = 0; i < s.l; ++i)
    if (s.sizes[i] == s.d) {
      pivot = i;
      break;
    }
  if (pivot >= 0) {
    // Some block has weight 1: drop that coordinate.  The remaining
    // coordinate images are a basis (the relation expresses e_pivot in
    // them with integer coefficients), and they keep their ambient names.
    qcoord[pivot].assign(s.l - 1, 0);
    int k = 0;
    for (int i = 0; i < s.l; ++i) {
      if (i == pivot) continue;
      qcoord[i].assign(s.l - 1, 0);
      qcoord[i][k] = 1;
      qcoord[pivot][k] = -(s.sizes[i] / s.d);
      lift[k].assign(s.l, 0);
      lift[k][i] = 1;
      kept_name[k] = "y" + std::to_string(i + 1);
      ++k;
    }
  } else if (s.l > 1) {
    // No weight-1 block (e.g. sizes (2,3)): complete w to a Z-basis by
    // running the extended Euclid algorithm on its entries, tracking the
    // unimodular row operations.  Rows 2..l of the accumulated U (with
    // U w = e_1) are the quotient coordinates; columns 2..l of U^{-1} are
    // integral lifts of the basis.
    std::vector<std::int64_t> v(s.l);
    for (int i = 0; i < s.l; ++i) v[i] = s.sizes[i] / s.d;
    std::vector<std::vector<std::int64_t>> U(
        s.l, std::vector<std::int64_t>(s.l, 0));
    for (int i = 0; i < s.l; ++i) U[i][i] = 1;
    for (int i = 1; i < s.l; ++i) {
      if (v[i] == 0) continue;
      std::int64_t a = 1, b = 0, g = v[0], x = 0, y = 1, r = v[i];
      while (r != 0) {  // extended gcd of (v[0], v[i])
        const std::int64_t qq = g / r;
        std::tie(g, r) = std::make_pair(r, g - qq * r);
        std::tie(a, x) = std::make_pair(x, a - qq * x);
        std::tie(b, y) = std::make_pair(y, b - qq * y);
      }
      const std::int64_t p = v[0] / g, q = v[i] / g;
      for (int c = 0; c < s.l; ++c) {
        const std::int64_t r0 = U[0][c], ri = U[i][c];
        U[0][c] = a * r0 + b * ri;
        U[i][c] = -q * r0 + p * ri;
      }
      v[0] = g;
      v[i] = 0;
    }
    ORB_CHECK(v[0] == 1, "weight vector is not primitive");
    MatrixQ uq(s.l, 2 * s.l);
    for (int rr = 0; rr < s.l; ++rr) {
      for (int c = 0; c < s.l; ++c) uq.at(rr, c) = Rat(U[rr][c]);
      uq.at(rr, s.l + rr) = Rat(1);
    }
    const MatrixQ inv = rref_kernel(uq).rref;
    for (int k = 0; k + 1 < s.l; ++k) {
      lift[k].assign(s.l, 0);
      for (int i = 0; i < s.l; ++i) {
        const Rat& c = inv.at(i, s.l + k + 1);  // column k+1 of U^{-1}
        ORB_CHECK(c.get_den() == 1, "basis completion is not unimodular");
        lift[k][i] = std::int64_t(c.get_num().get_si());
      }
      kept_name[k] = "w" + std::to_string(k + 1);
    }
    for (int i = 0; i < s.l; ++i) {
      qcoord[i].assign(s.l - 1, 0);
      for (int k = 0; k + 1 < s.l; ++k) qcoord[i][k] = U[k + 1][i];
    }
  }

  const int amb = 4 * s.l;
  std::vector<std::string> names(4 * (s.l - 1));
  for (int k = 0; k + 1 < s.l; ++k)
    for (int j = 0; j < 4; ++j)
      names[4 * k + j] = kept_name[k] + "_" + std::to_string(j + 1);
  s.model = Algebra::exterior(4 * (s.l - 1), names);

  s.proj1.assign(amb, {});
  for (int i = 0; i < s.l; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k + 1 < s.l; ++k)
        if (qcoord[i][k] != 0)
          s.proj1[4 * i + j].emplace_back(4 * k + j, Rat(qcoord[i][k]));
  s.lift1.assign(4 * (s.l - 1), {});
  for (int k = 0; k + 1 < s.l; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < s.l; ++i)
        if (lift[k][i] != 0)
          s.lift1[4 * k + j].emplace_back(4 * i + j, Rat(lift[k][i]));

  // lift followed by projection must be the identity on the basis.
  for (int k = 0; k < 4 * (s.l - 1); ++k) {
    SparseVec img;
    for (const auto& [a, c] : s.lift1[k]) sparse_add(img, s.proj1[a], c);
    ORB_CHECK(img.size() == 1 && img[0].first == k && img[0].second == 1,
              "lattice basis lift does not project back to the basis");
  }
  // ... and projection must kill the weight relation.
  for (int j = 0; j < 4; ++j) {
    SparseVec img;
    for (int i = 0; i < s.l; ++i)
      sparse_add(img, s.proj1[4 * i + j], rat_frac(s.sizes[i], s.d));
    ORB_CHECK(img.empty(), "weight relation survives the projection");
  }
  return s;
}

SectorGeometry build_sector(const CaseConfig& cfg, const Permutation& g) {
  return build_sector(cfg, orbits_of(g));
}

SectorHom SectorHom::restriction(std::shared_ptr<const SectorGeometry> src,
                                 std::shared_ptr<const SectorGeometry> dst) {
  ORB_CHECK(src && dst, "null sector");
  ORB_CHECK(src->cfg.kind == dst->cfg.kind &&
                src->cfg.group_degree() == dst->cfg.group_degree(),
            "restriction across different cases");
  if (!coarsens(dst->part, src->part))
    throw input_error("restriction target must coarsen the source partition");

  SectorHom h;
  h.src_ = src;
  h.dst_ = dst;
  h.group_of_.resize(src->l);
  h.groups_.resize(dst->l);
  const std::vector<int> dst_block = dst->part.block_of();
  for (int i = 0; i < src->l; ++i) {
    int b = dst_block[src->part.blocks[i][0]];
    h.group_of_[i] = b;
    h.groups_[b].push_back(i);
  }

  if (src->cfg.kind == CaseKind::KummerB) {
    // Degree-1 images: lift a source basis generator to the ambient letter
    // block, push each ambient generator (block i, letter j) to ambient
    // (block_of(i), letter j) of the destination, and project to the
    // destination basis.  Independent of the lift choice because the weight
    // relation maps into the weight relation (checked below).
    h.one_images_.resize(src->lift1.size());
    for (std::size_t k = 0; k < src->lift1.size(); ++k) {
      SparseVec img;
      for (const auto& [amb, c] : src->lift1[k])
        sparse_add(img, dst->proj1[4 * h.group_of_[amb / 4] + amb % 4], c);
      h.one_images_[k] = std::move(img);
    }
    // Well-definedness: each source weight vector, pushed through the
    // ambient coarsening, must land in the destination's weight space,
    // i.e. project to zero.  (It equals d_dst/d_src times the destination
    // weight vector.)
    for (int j = 0; j < 4; ++j) {
      SparseVec img;
      for (int i = 0; i < src->l; ++i)
        sparse_add(img, dst->proj1[4 * h.group_of_[i] + j],
                   rat_frac(src->sizes[i], src->d));
      ORB_CHECK(img.empty(), "weight space does not map into weight space");
    }
  }
  return h;
}

SectorHom SectorHom::conjugation(std::shared_ptr<const SectorGeometry> src,
                                 std::shared_ptr<const SectorGeometry> dst,
                                 const Permutation& h) {
  ORB_CHECK(src && dst, "null sector");
  ORB_CHECK(src->cfg.kind == dst->cfg.kind &&
                src->cfg.group_degree() == dst->cfg.group_degree(),
            "conjugation across different cases");
  ORB_CHECK(h.degree() == src->part.n, "conjugator has wrong degree");

  // h maps the orbit containing x to the orbit containing h(x); as a map
  // of blocks this must be a size-preserving bijection src -> dst.
  const std::vector<int> dst_block = dst->part.block_of();
  std::vector<int> pi(src->l, -1);
  for (int i = 0; i < src->l; ++i) {
    int b = dst_block[h.img[src->part.blocks[i][0]]];
    for (int x : src->part.blocks[i])
      ORB_CHECK(dst_block[h.img[x]] == b,
                "conjugator does not map orbits to orbits");
    ORB_CHECK(src->sizes[i] == dst->sizes[b], "conjugation changed a size");
    pi[i] = b;
  }

  SectorHom hom;
  hom.src_ = src;
  hom.dst_ = dst;
  hom.group_of_ = pi;
  hom.groups_.resize(dst->l);
  for (int b = 0; b < dst->l; ++b) {
    auto it = std::find(pi.begin(), pi.end(), b);
    ORB_CHECK(it != pi.end(), "conjugation block map not surjective");
    hom.groups_[b].push_back(static_cast<int>(it - pi.begin()));
  }
  if (src->cfg.kind == CaseKind::KummerB) {
    hom.one_images_.resize(src->lift1.size());
    for (std::size_t k = 0; k < src->lift1.size(); ++k) {
      SparseVec img;
      for (const auto& [amb, c] : src->lift1[k])
        sparse_add(img, dst->proj1[4 * pi[amb / 4] + amb % 4], c);
      hom.one_images_[k] = std::move(img);
    }
  }
  return hom;
}

const SparseVec& SectorHom::apply(int deg, int idx) const {
  std::uint64_t key = (std::uint64_t(deg) << 32) | std::uint64_t(idx);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  return memo_.emplace(key, compute(deg, idx)).first->second;
}

SparseVec SectorHom::apply_vec(int deg, const SparseVec& v) const {
  SparseVec out;
  for (const auto& [idx, c] : v) sparse_add(out, apply(deg, idx), c);
  return out;
}

SparseVec SectorHom::compute(int deg, int idx) const {
  if (src_->cfg.kind == CaseKind::KummerB) {
    // Wedge of the degree-1 images of the monomial's generators.
    auto tuple = src_->model.exterior_tuple(deg, idx);
    std::vector<SparseVec> imgs;
    imgs.reserve(tuple.size());
    for (int gidx : tuple) imgs.push_back(one_images_[gidx]);
    return dst_->model.wedge(imgs);
  }

  // Case A: regroup the tensor factors by destination block, with the
  // Koszul sign of the stable reordering, then multiply within each group.
  auto parts = src_->model.tensor_parts(deg, idx);
  int inv = 0;
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b)
      if (group_of_[a] > group_of_[b]) inv += parts[a].first * parts[b].first;
  Rat sign((inv % 2 == 0) ? 1 : -1);

  const Algebra& base = dst_->model.factor(0);
  // Per destination block, the product of the member parts (a sparse vector
  // in the base model); then the outer product over blocks.
  std::vector<SparseVec> block_vec(dst_->l);
  std::vector<int> block_deg(dst_->l, 0);
  for (int b = 0; b < dst_->l; ++b) {
    SparseVec acc{{0, Rat(1)}};
    int dacc = 0;
    for (int m : groups_[b]) {
      SparseVec next;
      for (const auto& [i, c] : acc)
        sparse_add(next, base.mul(dacc, i, parts[m].first, parts[m].second),
                   c);
      acc = std::move(next);
      dacc += parts[m].first;
      if (acc.empty()) break;
    }
    if (acc.empty()) return {};
    block_vec[b] = std::move(acc);
    block_deg[b] = dacc;
  }

  // Cartesian product of the per-block terms.
  SparseVec out;
  std::vector<std::size_t> pick(dst_->l, 0);
  std::vector<std::pair<int, int>> dparts(dst_->l);
  while (true) {
    Rat coef = sign;
    for (int b = 0; b < dst_->l; ++b) {
      dparts[b] = {block_deg[b], block_vec[b][pick[b]].first};
      coef *= block_vec[b][pick[b]].second;
    }
    sparse_add(out, {{dst_->model.tensor_index(dparts), Rat(1)}}, coef);
    int b = dst_->l - 1;
    while (b >= 0 && ++pick[b] == block_vec[b].size()) pick[b--] = 0;
    if (b < 0) break;
  }
  return out;
}

}  // namespace orbring
