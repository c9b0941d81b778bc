#include <omp.h>

#include <cmath>
#include <vector>

#include "rao/kernels.hpp"

namespace rao::kernels {

bool use_parallel(Exec exec, Eigen::Index rows) {
  switch (exec) {
    case Exec::Serial:
      return false;
    case Exec::Parallel:
      return true;
    case Exec::Auto:
      return rows >= kAutoParallelRows && !omp_in_parallel();
  }
  return false;
}

namespace omp {

namespace {

Eigen::Index block_count(Eigen::Index n) { return (n + kBlockRows - 1) / kBlockRows; }

}  // namespace

Vector dpd_weights(const Matrix& x, const Vector& center, const Matrix& precision,
                   double beta) {
  const Eigen::Index n = x.rows();
  Vector w(n);
  if (beta == 0.0) {
    w.setOnes();
    return w;
  }
  // Each weight is independent, so no reduction order to worry about.
#pragma omp parallel
  {
    Vector d(x.cols());
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      d = x.row(i).transpose() - center;
      w[i] = std::exp(-0.5 * beta * d.dot(precision * d));
    }
  }
  return w;
}

Vector weighted_mean(const Matrix& x, const Vector& w) {
  const Eigen::Index blocks = block_count(x.rows());
  const Eigen::Index p = x.cols();
  Matrix partial = Matrix::Zero(p, blocks);
  std::vector<double> partial_w(blocks, 0.0);

#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index lo = b * kBlockRows;
    const Eigen::Index hi = std::min(lo + kBlockRows, x.rows());
    Vector acc = Vector::Zero(p);
    double tw = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i) {
      acc += w[i] * x.row(i).transpose();
      tw += w[i];
    }
    partial.col(b) = acc;
    partial_w[b] = tw;
  }

  Vector acc = Vector::Zero(p);
  double total = 0.0;
  for (Eigen::Index b = 0; b < blocks; ++b) {
    acc += partial.col(b);
    total += partial_w[b];
  }
  return acc / total;
}

Matrix weighted_cross(const Matrix& x, const Vector& w, const Vector& center) {
  const Eigen::Index blocks = block_count(x.rows());
  const Eigen::Index p = x.cols();
  std::vector<Matrix> partial(blocks, Matrix::Zero(p, p));

#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index lo = b * kBlockRows;
    const Eigen::Index hi = std::min(lo + kBlockRows, x.rows());
    Matrix& acc = partial[b];
    Vector d(p);
    for (Eigen::Index i = lo; i < hi; ++i) {
      d = x.row(i).transpose() - center;
      acc.selfadjointView<Eigen::Lower>().rankUpdate(d, w[i]);
    }
  }

  Matrix acc = Matrix::Zero(p, p);
  for (const Matrix& m : partial) acc += m;
  return acc.selfadjointView<Eigen::Lower>();
}

}  // namespace omp
}  // namespace rao::kernels
