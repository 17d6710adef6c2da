#pragma once
// Exact rational linear algebra: GMP-backed rationals, dense matrices,
// reduced row echelon form, kernels, and fixed-subspace (invariant) bases.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orbring {

// All exact arithmetic runs on GMP rationals. mpq_class keeps values
// canonical (reduced, positive denominator), which is exactly the contract
// we need; helpers below handle the "p/q" string form used in documents.
using Rat = mpq_class;

struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct bound_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define ORB_CHECK(cond, msg)                         \
  do {                                               \
    if (!(cond)) throw ::orbring::internal_error(msg); \
  } while (0)

std::string rat_str(const Rat& r);   // "3", "-2/7"
Rat parse_rat(const std::string& s); // accepts "p" and "p/q"

// mpq_class's two-argument constructor stores num/den verbatim; GMP
// arithmetic silently assumes canonical operands.  Use this whenever the
// two arguments are not known to be coprime.
inline Rat rat_frac(std::int64_t num, std::int64_t den) {
  Rat r(static_cast<long>(num), static_cast<long>(den));
  r.canonicalize();
  return r;
}

// Sparse vector inside one graded block: (index, coefficient), sorted by
// index, no zero coefficients.
using SparseVec = std::vector<std::pair<int, Rat>>;

void sparse_add(SparseVec& acc, const SparseVec& v, const Rat& scale);
SparseVec sparse_scale(const SparseVec& v, const Rat& scale);
bool sparse_eq(const SparseVec& a, const SparseVec& b);

class MatrixQ {
 public:
  MatrixQ() : rows_(0), cols_(0) {}
  MatrixQ(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rat& at(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const Rat& at(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  static MatrixQ identity(int n);
  MatrixQ operator*(const MatrixQ& o) const;
  MatrixQ operator+(const MatrixQ& o) const;
  MatrixQ operator-(const MatrixQ& o) const;
  MatrixQ scaled(const Rat& s) const;
  bool operator==(const MatrixQ& o) const = default;

 private:
  int rows_, cols_;
  std::vector<Rat> a_;
};

struct RrefResult {
  MatrixQ rref;
  int rank = 0;
  std::vector<int> pivot_cols;       // increasing
  std::vector<std::vector<Rat>> kernel;  // basis of the right kernel
};

// Gaussian elimination over Q, first-nonzero pivoting (deterministic).
RrefResult rref_kernel(const MatrixQ& m);

// Basis of the common fixed subspace of a list of action matrices
// (kernel of stacked (A_h - I)).  Matrices must be square, same size.
// If free_cols is non-null it receives, per basis vector, the coordinate
// the vector "owns": it is 1 there and every other basis vector is 0 there,
// so coefficients in this basis can be read off directly.
std::vector<std::vector<Rat>> invariant_basis(const std::vector<MatrixQ>& actions,
                                              std::vector<int>* free_cols = nullptr);

}  // namespace orbring
