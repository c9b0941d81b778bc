#include "rao/kernels.hpp"

#include <cmath>

namespace rao::kernels::serial {

Vector dpd_weights(const Matrix& x, const Vector& center, const Matrix& precision,
                   double beta) {
  const Eigen::Index n = x.rows();
  Vector w(n);
  if (beta == 0.0) {
    w.setOnes();
    return w;
  }
  Vector d(x.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    d = x.row(i).transpose() - center;
    w[i] = std::exp(-0.5 * beta * d.dot(precision * d));
  }
  return w;
}

Vector weighted_mean(const Matrix& x, const Vector& w) {
  Vector acc = Vector::Zero(x.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    acc += w[i] * x.row(i).transpose();
    total += w[i];
  }
  return acc / total;
}

Matrix weighted_cross(const Matrix& x, const Vector& w, const Vector& center) {
  const Eigen::Index p = x.cols();
  Matrix acc = Matrix::Zero(p, p);
  Vector d(p);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    d = x.row(i).transpose() - center;
    acc.selfadjointView<Eigen::Lower>().rankUpdate(d, w[i]);
  }
  return acc.selfadjointView<Eigen::Lower>();
}

}  // namespace rao::kernels::serial
