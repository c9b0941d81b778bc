#include "rao/matrix_ops.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rao/errors.hpp"

namespace rao {

namespace {

void require_materializable(int p, const char* what) {
  if (p < 1) throw DomainError(std::string(what) + ": dimension must be >= 1");
  if (p > kMaxMaterializedDim) {
    std::ostringstream os;
    os << what << ": p = " << p << " exceeds " << kMaxMaterializedDim
       << "; use the index-map functions instead";
    throw DomainError(os.str());
  }
}

SparseMatrix from_triplets(int rows, int cols,
                           const std::vector<Eigen::Triplet<double>>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << "symmetric matrix expected, got " << a.rows() << "x" << a.cols();
    throw StructuralError(os.str());
  }
  if (a.rows() == 0) throw StructuralError("symmetric matrix must be non-empty");
  a_ = a;
  const Eigen::Index p = a.rows();
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = j + 1; i < p; ++i) {
      const double lo = a(i, j);
      const double up = a(j, i);
      const double scale = std::max({1.0, std::abs(lo), std::abs(up)});
      if (!(std::abs(lo - up) <= kSymmetryTolerance * scale)) {
        std::ostringstream os;
        os << "matrix is not symmetric at (" << i + 1 << "," << j + 1
           << "): " << lo << " vs " << up;
        throw StructuralError(os.str());
      }
      const double avg = 0.5 * (lo + up);
      a_(i, j) = avg;
      a_(j, i) = avg;
    }
  }
}

SparseMatrix StructMatrix::variance_block() const {
  return entries.leftCols(p);
}

SparseMatrix StructMatrix::covariance_block() const {
  return entries.rightCols(vecl_size(p));
}

HalfVec vech(const SymMatrix& a) {
  const int p = a.dim();
  HalfVec h{HalfVecKind::Vech, p, Vector(vech_size(p))};
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) h.values[vech_index(i, j, p)] = a(i, j);
  return h;
}

HalfVec vecl(const SymMatrix& a) {
  const int p = a.dim();
  if (p < 2) throw StructuralError("vecl requires p >= 2");
  HalfVec h{HalfVecKind::Vecl, p, Vector(vecl_size(p))};
  for (int j = 0; j < p; ++j)
    for (int i = j + 1; i < p; ++i) h.values[vecl_index(i, j, p)] = a(i, j);
  return h;
}

SymMatrix unvech(const HalfVec& h) {
  if (h.kind != HalfVecKind::Vech || h.values.size() != vech_size(h.p))
    throw StructuralError("unvech: expected a vech of matching length");
  Matrix a(h.p, h.p);
  for (int j = 0; j < h.p; ++j)
    for (int i = j; i < h.p; ++i) a(i, j) = a(j, i) = h.values[vech_index(i, j, h.p)];
  return SymMatrix(a);
}

StructMatrix duplication_matrix(int p) {
  require_materializable(p, "duplication_matrix");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(p) * p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) {
      const int k = i >= j ? vech_index(i, j, p) : vech_index(j, i, p);
      t.emplace_back(j * p + i, k, 1.0);
    }
  }
  return {StructKind::Duplication, p, from_triplets(p * p, vech_size(p), t)};
}

// Moore-Penrose inverse (G'G)^{-1} G' of the duplication matrix: 1 on
// diagonal positions, 1/2 on each of the two mirrored off-diagonal positions.
StructMatrix elimination_matrix(int p) {
  require_materializable(p, "elimination_matrix");
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < p; ++j) {
    for (int i = j; i < p; ++i) {
      const int k = vech_index(i, j, p);
      if (i == j) {
        t.emplace_back(k, j * p + i, 1.0);
      } else {
        t.emplace_back(k, j * p + i, 0.5);
        t.emplace_back(k, i * p + j, 0.5);
      }
    }
  }
  return {StructKind::Elimination, p, from_triplets(vech_size(p), p * p, t)};
}

StructMatrix reorder_permutation(int p) {
  require_materializable(p, "reorder_permutation");
  const int m = vech_size(p);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(m);
  // P: column i picks the vech slot of sigma_i^2.
  for (int i = 0; i < p; ++i) t.emplace_back(vech_index(i, i, p), i, 1.0);
  // Q: column s picks sigma_ij, pairs (i<j) in lexicographic order.
  int s = p;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) t.emplace_back(vech_index(j, i, p), s++, 1.0);
  return {StructKind::Permutation, p, from_triplets(m, m, t)};
}

Vector duplicate(const Vector& vech_values, int p) {
  if (vech_values.size() != vech_size(p))
    throw StructuralError("duplicate: vech length does not match p");
  Vector out(static_cast<Eigen::Index>(p) * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i)
      out[j * p + i] = vech_values[i >= j ? vech_index(i, j, p) : vech_index(j, i, p)];
  return out;
}

Vector eliminate(const Vector& vec_values, int p) {
  if (vec_values.size() != static_cast<Eigen::Index>(p) * p)
    throw StructuralError("eliminate: vec length does not match p");
  Vector out(vech_size(p));
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i)
      out[vech_index(i, j, p)] = 0.5 * (vec_values[j * p + i] + vec_values[i * p + j]);
  return out;
}

Matrix equicorrelation(double rho, int p) {
  Matrix r = Matrix::Constant(p, p, rho);
  r.diagonal().setOnes();
  return r;
}

double equicorr_lower_bound(int p) {
  return p > 1 ? -1.0 / (p - 1) : -std::numeric_limits<double>::infinity();
}

SymMatrix equicorr_inverse(double rho, int p) {
  if (p < 1) throw DomainError("equicorr_inverse: p must be >= 1");
  const double lo = equicorr_lower_bound(p);
  if (!(rho > lo && rho < 1.0)) {
    std::ostringstream os;
    os << "equicorrelation " << rho << " outside the admissible interval (" << lo
       << ", 1) for p = " << p;
    throw DomainError(os.str());
  }
  const double c = rho / (1.0 + (p - 1) * rho);
  Matrix inv = Matrix::Constant(p, p, -c);
  inv.diagonal().array() += 1.0;
  inv /= (1.0 - rho);
  return SymMatrix(inv);
}

}  // namespace rao
