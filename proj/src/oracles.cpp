#include "orbring/oracles.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace orbring {

namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Binomial for series expansion exponents (small j, possibly larger b).
std::int64_t choose64(std::int64_t b, int j) {
  std::int64_t r = 1;
  for (int i = 1; i <= j; ++i) r = r * (b - i + 1) / i;
  return r;
}

Rat det_gauss(MatrixQ m) {
  const int n = m.rows();
  ORB_CHECK(n == m.cols(), "det: not square");
  Rat det(1);
  for (int col = 0, row = 0; col < n && row < n; ++col, ++row) {
    int piv = -1;
    for (int i = row; i < n; ++i)
      if (m.at(i, col) != 0) { piv = i; break; }
    if (piv < 0) return Rat(0);
    if (piv != row) {
      for (int j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(row, j));
      det = -det;
    }
    det *= m.at(row, col);
    Rat inv = 1 / m.at(row, col);
    for (int i = row + 1; i < n; ++i) {
      if (m.at(i, col) == 0) continue;
      Rat f = m.at(i, col) * inv;
      for (int j = col; j < n; ++j) m.at(i, j) -= f * m.at(row, j);
    }
  }
  return det;
}

// Permutation of the orbit blocks of g induced by a centralizing h:
// block i -> block containing h(first element of block i).
std::vector<int> orbit_permutation(const SetPartition& orbits,
                                   const Permutation& h) {
  auto of = orbits.block_of();
  std::vector<int> pi(orbits.size());
  for (int i = 0; i < orbits.size(); ++i) pi[i] = of[h.img[orbits.blocks[i][0]]];
  return pi;
}

// det(I + t*A) by Lagrange interpolation at t = 0..n; returns rational
// coefficients (degree n).
std::vector<Rat> char_like_poly(const MatrixQ& a) {
  const int n = a.rows();
  std::vector<Rat> ys(n + 1);
  for (int k = 0; k <= n; ++k) {
    MatrixQ m = MatrixQ::identity(n) + a.scaled(Rat(k));
    ys[k] = det_gauss(m);
  }
  // Lagrange basis accumulation.
  std::vector<Rat> out(n + 1, Rat(0));
  for (int k = 0; k <= n; ++k) {
    std::vector<Rat> basis{Rat(1)};
    Rat denom(1);
    for (int j = 0; j <= n; ++j) {
      if (j == k) continue;
      // multiply basis by (t - j)
      std::vector<Rat> nb(basis.size() + 1, Rat(0));
      for (size_t c = 0; c < basis.size(); ++c) {
        nb[c + 1] += basis[c];
        nb[c] -= Rat(j) * basis[c];
      }
      basis = std::move(nb);
      denom *= Rat(k - j);
    }
    Rat scale = ys[k] / denom;
    for (size_t c = 0; c < basis.size(); ++c) out[c] += basis[c] * scale;
  }
  return out;
}

Poly rat_poly_to_int(const std::vector<Rat>& p, const char* what) {
  Poly out(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    ORB_CHECK(p[i].get_den() == 1, std::string("non-integral coefficient in ") + what);
    out[i] = std::int64_t(p[i].get_num().get_si());
  }
  return poly_trim(std::move(out));
}

}  // namespace

std::int64_t euler_commuting_pairs(const CaseConfig& cfg) {
  cfg.validate();
  const int N = cfg.group_degree();
  auto group = all_permutations(N);
  std::int64_t e_base = 0;
  if (cfg.kind == CaseKind::HilbA)
    for (int i = 0; i < 5; ++i)
      e_base += (i % 2 ? -1 : 1) * cfg.base_betti[i];
  std::int64_t sum = 0;
  for (const auto& g : group)
    for (const auto& h : group) {
      if (compose(g, h) != compose(h, g)) continue;
      auto J = orbit_join(g, h);
      if (cfg.kind == CaseKind::HilbA) {
        sum += ipow(e_base, J.size());
      } else {
        if (J.size() == 1) sum += ipow(N, 4);
      }
    }
  std::int64_t order = std::int64_t(factorial(N));
  ORB_CHECK(sum % order == 0, "euler_commuting_pairs: not divisible by |G|");
  return sum / order;
}

std::vector<Poly> gottsche_series(const std::array<std::int64_t, 5>& betti,
                                  int n_max) {
  ORB_CHECK(n_max >= 0 && n_max <= 8, "gottsche_series: n_max out of range");
  std::vector<Poly> series(n_max + 1);
  series[0] = Poly{1};
  auto mul_factor = [&](int a, int m, std::int64_t b, bool odd_family) {
    if (b == 0) return;
    // factor coefficient of z^{m j}: C(b, j) (odd) or C(b-1+j, j) (even),
    // at t-degree a*j.
    std::vector<Poly> next(n_max + 1);
    for (int tot = 0; tot <= n_max; ++tot) {
      for (int j = 0; m * j <= tot; ++j) {
        if (odd_family && j > b) break;
        std::int64_t c = odd_family ? choose64(b, j) : choose64(b - 1 + j, j);
        if (c == 0) continue;
        const Poly& src = series[tot - m * j];
        if (src.empty()) continue;
        Poly term = poly_shift(src, a * j);
        for (auto& v : term) v *= c;
        next[tot] = poly_add(next[tot], term);
      }
    }
    series = std::move(next);
  };
  for (int m = 1; m <= n_max; ++m) {
    mul_factor(2 * m - 2, m, betti[0], false);
    mul_factor(2 * m - 1, m, betti[1], true);
    mul_factor(2 * m, m, betti[2], false);
    mul_factor(2 * m + 1, m, betti[3], true);
    mul_factor(2 * m + 2, m, betti[4], false);
  }
  return series;
}

Poly molien_dims(const std::vector<Poly>& traces, std::uint64_t order) {
  ORB_CHECK(order > 0, "molien_dims: zero order");
  Poly sum;
  for (const auto& t : traces) sum = poly_add(sum, t);
  for (auto& c : sum) {
    ORB_CHECK(c % std::int64_t(order) == 0, "molien_dims: non-integral average");
    c /= std::int64_t(order);
    ORB_CHECK(c >= 0, "molien_dims: negative dimension");
  }
  return poly_trim(std::move(sum));
}

Poly sector_trace_formula(const CaseConfig& cfg, const Permutation& g,
                          const Permutation& h) {
  ORB_CHECK(compose(g, h) == compose(h, g), "sector_trace_formula: h must centralize g");
  auto orbits = orbits_of(g);
  const int l = orbits.size();
  auto pi = orbit_permutation(orbits, h);
  const int shift = 2 * age(cfg, g);

  if (cfg.kind == CaseKind::HilbA) {
    Poly px(cfg.base_betti.begin(), cfg.base_betti.end());
    Poly out{1};
    std::vector<bool> seen(l, false);
    for (int i = 0; i < l; ++i) {
      if (seen[i]) continue;
      int r = 0, j = i;
      while (!seen[j]) { seen[j] = true; j = pi[j]; ++r; }
      out = poly_mul(out, poly_subst_signed_power(px, r, r % 2 ? 1 : -1));
    }
    return poly_shift(out, shift);
  }

  // Case B: d^4 * det(I + t * pibar)^4 on Q^l / span(weights).
  auto sizes = orbits.block_sizes();
  int d = 0;
  for (int s : sizes) d = std::gcd(d, s);
  // pibar on the complement coordinates 1..l-1 (e_0 = -sum w_i/w_0 e_i).
  MatrixQ m(l - 1 > 0 ? l - 1 : 0, l - 1 > 0 ? l - 1 : 0);
  for (int c = 1; c < l; ++c) {
    int img = pi[c];
    if (img == 0) {
      for (int r = 1; r < l; ++r)
        m.at(r - 1, c - 1) = -rat_frac(sizes[r], sizes[0]);
    } else {
      m.at(img - 1, c - 1) = 1;
    }
  }
  Poly p = l > 1 ? rat_poly_to_int(char_like_poly(m), "sector trace det")
                 : Poly{1};
  Poly out{ipow(d, 4)};
  for (int k = 0; k < 4; ++k) out = poly_mul(out, p);
  return poly_shift(out, shift);
}

Poly molien_invariant_poincare(const CaseConfig& cfg) {
  cfg.validate();
  const int N = cfg.group_degree();
  auto group = all_permutations(N);
  std::vector<Poly> traces;
  traces.reserve(group.size());
  for (const auto& g : group)
    for (const auto& h : group)
      if (compose(g, h) == compose(h, g))
        traces.push_back(sector_trace_formula(cfg, g, h));
  return molien_dims(traces, factorial(N));
}

TorsionAudit torsion_bruteforce(int group_degree, const Permutation& g,
                                const Permutation& h, int cap) {
  ORB_CHECK(g.degree() == group_degree && h.degree() == group_degree,
            "torsion_bruteforce: degree mismatch");
  auto og = orbits_of(g);
  auto J = orbit_join(g, h);
  ORB_CHECK(coarsens(J, og), "torsion_bruteforce: join must coarsen orbits");
  auto lam = og.block_sizes();
  auto mu = J.block_sizes();
  int dg = 0, dj = 0;
  for (int s : lam) dg = std::gcd(dg, s);
  for (int s : mu) dj = std::gcd(dj, s);
  ORB_CHECK(dj % dg == 0, "torsion_bruteforce: d_g must divide d_J");
  const int L = dj;  // lcm(dg, dj) = dj
  if (L > cap) throw bound_error("torsion_bruteforce: torsion level exceeds cap");

  TorsionAudit audit;
  audit.g_components = ipow(dg, 4);
  audit.j_components = ipow(dj, 4);

  // Single-letter solution sets (the four H^1-letters decouple).
  auto solutions = [&](const std::vector<int>& w, int d) {
    // all a in (Z/L)^k with sum w_i a_i = 0 mod L; returns (vector a, label).
    std::vector<std::pair<std::vector<int>, int>> out;
    const int k = int(w.size());
    std::vector<int> a(k, 0);
    while (true) {
      long s = 0, sl = 0;
      for (int i = 0; i < k; ++i) {
        s += long(w[i]) * a[i];
        sl += long(w[i] / d) * a[i];
      }
      if (s % L == 0) {
        // label: (sum (w_i/d) a_i)/L as an element of (1/d)Z/Z
        long r = sl % L;
        if (r < 0) r += L;
        ORB_CHECK(r % (L / d) == 0, "torsion label not d-torsion");
        out.push_back({a, int(r / (L / d))});
      }
      int i = k - 1;
      while (i >= 0 && a[i] == L - 1) a[i--] = 0;
      if (i < 0) break;
      ++a[i];
    }
    return out;
  };

  auto sol_g = solutions(lam, dg);
  auto sol_j = solutions(mu, dj);

  // (a) equal counts per label => d components per letter, d^4 overall.
  auto counts_balanced = [](const std::vector<std::pair<std::vector<int>, int>>& sols,
                            int d) {
    std::map<int, std::int64_t> cnt;
    for (const auto& [a, lab] : sols) cnt[lab]++;
    if (int(cnt.size()) != d) return false;
    for (const auto& [lab, c] : cnt)
      if (lab < 0 || lab >= d || c != std::int64_t(sols.size()) / d) return false;
    return true;
  };
  audit.counts_ok = counts_balanced(sol_g, dg) && counts_balanced(sol_j, dj);

  // (b) label translation along M^J c= M^g: tau = tau' mod d_g.
  auto jof = J.block_of();
  audit.labels_ok = true;
  for (const auto& [b, labj] : sol_j) {
    // lift to a g-orbit configuration
    long sl = 0, s = 0;
    for (int i = 0; i < og.size(); ++i) {
      int bi = b[jof[og.blocks[i][0]]];
      s += long(lam[i]) * bi;
      sl += long(lam[i] / dg) * bi;
    }
    ORB_CHECK(s % L == 0, "lifted point violates g-constraint");
    long r = sl % L;
    if (r < 0) r += L;
    ORB_CHECK(r % (L / dg) == 0, "lifted label not d_g-torsion");
    int labg = int(r / (L / dg));
    if (labg != labj % dg) audit.labels_ok = false;
  }

  // (c) full four-letter enumeration when cheap: solution counts multiply.
  const int l = og.size();
  double full = 1;
  for (int i = 0; i < 4 * l; ++i) full *= L;
  if (full <= 2e6 && L > 1) {
    std::int64_t total = 0;
    std::vector<int> a(4 * l, 0);  // letter-major: a[4*i + letter]
    while (true) {
      bool ok = true;
      for (int letter = 0; letter < 4 && ok; ++letter) {
        long s = 0;
        for (int i = 0; i < l; ++i) s += long(lam[i]) * a[4 * i + letter];
        if (s % L != 0) ok = false;
      }
      if (ok) ++total;
      int i = 4 * l - 1;
      while (i >= 0 && a[i] == L - 1) a[i--] = 0;
      if (i < 0) break;
      ++a[i];
    }
    if (total != ipow(std::int64_t(sol_g.size()), 4)) audit.counts_ok = false;
  }
  return audit;
}

}  // namespace orbring
