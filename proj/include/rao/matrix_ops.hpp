#pragma once

// Structural matrix calculus for symmetric matrices.
//
// Every half-vectorization in the library uses the column-major lower
// triangle order: vech(A) = (a11, a21, ..., ap1, a22, a32, ..., app) and
// vecl(A) is the same sequence with the diagonal removed. The reordering
// permutation below depends on this convention.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace rao {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Largest p for which duplication/elimination/permutation matrices are
// materialized. Above it only the index maps (duplicate/eliminate) work.
inline constexpr int kMaxMaterializedDim = 64;

// Relative asymmetry accepted (and averaged away) by SymMatrix.
inline constexpr double kSymmetryTolerance = 1e-12;

// A validated symmetric matrix. Construction symmetrizes entries that differ
// by at most kSymmetryTolerance * max(1, |a_ij|) and rejects anything else.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(int p) { return SymMatrix(Matrix::Identity(p, p)); }

  int dim() const noexcept { return static_cast<int>(a_.rows()); }
  const Matrix& matrix() const noexcept { return a_; }
  double operator()(int i, int j) const { return a_(i, j); }

 private:
  Matrix a_;
};

enum class HalfVecKind { Vech, Vecl };

struct HalfVec {
  HalfVecKind kind = HalfVecKind::Vech;
  int p = 0;
  Vector values;
};

enum class StructKind { Duplication, Elimination, Permutation };

struct StructMatrix {
  StructKind kind = StructKind::Duplication;
  int p = 0;
  SparseMatrix entries;

  Matrix dense() const { return Matrix(entries); }

  // Column blocks of the reordering permutation M = (P, Q): P selects the
  // variances, Q the covariances. Only meaningful for kind == Permutation.
  SparseMatrix variance_block() const;
  SparseMatrix covariance_block() const;
};

constexpr int vech_size(int p) noexcept { return p * (p + 1) / 2; }
constexpr int vecl_size(int p) noexcept { return p * (p - 1) / 2; }

// 0-based position of element (row, col), row >= col, inside vech.
constexpr int vech_index(int row, int col, int p) noexcept {
  return col * p - col * (col - 1) / 2 + (row - col);
}

// 0-based position of element (row, col), row > col, inside vecl.
constexpr int vecl_index(int row, int col, int p) noexcept {
  return col * (p - 1) - col * (col - 1) / 2 + (row - col - 1);
}

HalfVec vech(const SymMatrix& a);
HalfVec vecl(const SymMatrix& a);

// Inverse of vech for a symmetric matrix.
SymMatrix unvech(const HalfVec& h);

StructMatrix duplication_matrix(int p);
StructMatrix elimination_matrix(int p);
StructMatrix reorder_permutation(int p);

// Index-map versions of G_p * vech and L_p * vec; valid for any p.
Vector duplicate(const Vector& vech_values, int p);
Vector eliminate(const Vector& vec_values, int p);

// Equicorrelation matrix (1 - rho) I + rho 11^T.
Matrix equicorrelation(double rho, int p);

// Admissible lower bound -1/(p-1) for an equicorrelation level (-inf at p=1).
double equicorr_lower_bound(int p);

// Closed-form inverse of the equicorrelation matrix,
// (1/(1-rho)) (I - rho/(1+(p-1)rho) 11^T). Throws DomainError outside
// (-1/(p-1), 1).
SymMatrix equicorr_inverse(double rho, int p);

namespace detail {

// Column-major vec.
inline Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

inline Matrix unvec(const Vector& v, int rows) {
  return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace detail

}  // namespace rao
