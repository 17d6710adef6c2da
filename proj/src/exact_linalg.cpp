#include "orbring/exact_linalg.hpp"

#include <algorithm>

namespace orbring {

std::string rat_str(const Rat& r) {
  std::string s = r.get_num().get_str();
  if (r.get_den() != 1) s += "/" + r.get_den().get_str();
  return s;
}

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw input_error("empty rational literal");
  Rat r;
  if (r.set_str(s, 10) != 0) throw input_error("bad rational literal: " + s);
  if (r.get_den() == 0) throw input_error("zero denominator: " + s);
  r.canonicalize();
  return r;
}

void sparse_add(SparseVec& acc, const SparseVec& v, const Rat& scale) {
  if (v.empty() || scale == 0) return;
  SparseVec out;
  out.reserve(acc.size() + v.size());
  size_t i = 0, j = 0;
  while (i < acc.size() || j < v.size()) {
    if (j == v.size() || (i < acc.size() && acc[i].first < v[j].first)) {
      out.push_back(std::move(acc[i++]));
    } else if (i == acc.size() || v[j].first < acc[i].first) {
      out.emplace_back(v[j].first, v[j].second * scale);
      ++j;
    } else {
      Rat c = acc[i].second + v[j].second * scale;
      if (c != 0) out.emplace_back(acc[i].first, std::move(c));
      ++i, ++j;
    }
  }
  acc = std::move(out);
}

SparseVec sparse_scale(const SparseVec& v, const Rat& scale) {
  if (scale == 0) return {};
  SparseVec out = v;
  for (auto& [i, c] : out) c *= scale;
  return out;
}

bool sparse_eq(const SparseVec& a, const SparseVec& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].first != b[i].first || a[i].second != b[i].second) return false;
  return true;
}

MatrixQ MatrixQ::identity(int n) {
  MatrixQ m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

MatrixQ MatrixQ::operator*(const MatrixQ& o) const {
  ORB_CHECK(cols_ == o.rows_, "matrix product shape mismatch");
  MatrixQ r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Rat& v = at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < o.cols_; ++j)
        if (o.at(k, j) != 0) r.at(i, j) += v * o.at(k, j);
    }
  return r;
}

MatrixQ MatrixQ::operator+(const MatrixQ& o) const {
  ORB_CHECK(rows_ == o.rows_ && cols_ == o.cols_, "matrix sum shape mismatch");
  MatrixQ r = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(i, j) += o.at(i, j);
  return r;
}

MatrixQ MatrixQ::operator-(const MatrixQ& o) const {
  ORB_CHECK(rows_ == o.rows_ && cols_ == o.cols_, "matrix diff shape mismatch");
  MatrixQ r = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(i, j) -= o.at(i, j);
  return r;
}

MatrixQ MatrixQ::scaled(const Rat& s) const {
  MatrixQ r = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(i, j) *= s;
  return r;
}

RrefResult rref_kernel(const MatrixQ& m) {
  RrefResult res;
  res.rref = m;
  MatrixQ& a = res.rref;
  const int nr = a.rows(), nc = a.cols();
  int row = 0;
  for (int col = 0; col < nc && row < nr; ++col) {
    int piv = -1;
    for (int i = row; i < nr; ++i)
      if (a.at(i, col) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < nc; ++j) std::swap(a.at(piv, j), a.at(row, j));
    Rat inv = 1 / a.at(row, col);
    for (int j = col; j < nc; ++j) a.at(row, j) *= inv;
    for (int i = 0; i < nr; ++i) {
      if (i == row || a.at(i, col) == 0) continue;
      Rat f = a.at(i, col);
      for (int j = col; j < nc; ++j) a.at(i, j) -= f * a.at(row, j);
    }
    res.pivot_cols.push_back(col);
    ++row;
  }
  res.rank = row;

  // Kernel: one basis vector per free column.
  std::vector<bool> is_pivot(nc, false);
  for (int c : res.pivot_cols) is_pivot[c] = true;
  for (int c = 0; c < nc; ++c) {
    if (is_pivot[c]) continue;
    std::vector<Rat> v(nc);
    v[c] = 1;
    for (int r = 0; r < res.rank; ++r) {
      // pivot row r has pivot in pivot_cols[r]
      v[res.pivot_cols[r]] = -a.at(r, c);
    }
    res.kernel.push_back(std::move(v));
  }
  return res;
}

std::vector<std::vector<Rat>> invariant_basis(const std::vector<MatrixQ>& actions,
                                              std::vector<int>* free_cols) {
  ORB_CHECK(!actions.empty(), "invariant_basis: no actions");
  const int n = actions[0].rows();
  for (const auto& A : actions)
    ORB_CHECK(A.rows() == n && A.cols() == n, "invariant_basis: shape mismatch");
  MatrixQ stacked(int(actions.size()) * n, n);
  for (size_t k = 0; k < actions.size(); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        stacked.at(int(k) * n + i, j) =
            actions[k].at(i, j) - (i == j ? Rat(1) : Rat(0));
  auto rr = rref_kernel(stacked);
  if (free_cols) {
    free_cols->clear();
    std::vector<bool> is_pivot(n, false);
    for (int c : rr.pivot_cols) is_pivot[c] = true;
    for (int c = 0; c < n; ++c)
      if (!is_pivot[c]) free_cols->push_back(c);
  }
  return std::move(rr.kernel);
}

}  // namespace orbring
