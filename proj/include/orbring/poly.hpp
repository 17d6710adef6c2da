#pragma once
// Poincare polynomials: dense integer coefficient vectors, index = degree.

#include <cstdint>
#include <string>
#include <vector>

#include "orbring/exact_linalg.hpp"

namespace orbring {

using Poly = std::vector<std::int64_t>;

inline Poly poly_trim(Poly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return poly_trim(std::move(r));
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return poly_trim(std::move(r));
}

inline Poly poly_shift(const Poly& a, int k) {
  if (a.empty()) return {};
  Poly r(a.size() + k, 0);
  for (size_t i = 0; i < a.size(); ++i) r[i + k] = a[i];
  return r;
}

inline std::int64_t poly_eval_pm1(const Poly& a, bool at_minus_one) {
  std::int64_t v = 0;
  for (size_t i = 0; i < a.size(); ++i)
    v += (at_minus_one && i % 2) ? -a[i] : a[i];
  return v;
}

inline bool poly_palindromic(const Poly& a) {
  Poly p = poly_trim(a);
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != p[p.size() - 1 - i]) return false;
  return true;
}

inline std::string poly_str(const Poly& a) {
  Poly p = poly_trim(a);
  if (p.empty()) return "0";
  std::string out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (!out.empty()) out += " + ";
    out += std::to_string(p[i]);
    if (i == 1) out += "t";
    else if (i > 1) out += "t^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

// Substitute t -> s * t^r (s = +-1): used by trace product formulas.
inline Poly poly_subst_signed_power(const Poly& a, int r, int s) {
  if (a.empty()) return {};
  Poly out((a.size() - 1) * r + 1, 0);
  std::int64_t sp = 1;
  for (size_t i = 0; i < a.size(); ++i) {
    out[i * r] = a[i] * sp;
    sp *= s;
  }
  return poly_trim(std::move(out));
}

}  // namespace orbring
