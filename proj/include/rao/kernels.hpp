#pragma once

// Per-observation passes that dominate every fit: DPD weights, weighted
// means and weighted scatter matrices.
//
// Two implementations of each kernel exist. `serial` is the reference: a
// plain left-to-right loop whose summation order defines the answer. `omp`
// splits the rows into fixed blocks of kBlockRows, accumulates each block
// independently in parallel, then folds the block partials in block order.
// Because the blocking does not depend on the thread count, the omp results
// are bit-identical for any number of threads; they differ from the serial
// reference only by reassociation roundoff.

#include <Eigen/Dense>

namespace rao::kernels {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Exec {
  Serial,
  Parallel,
  // Parallel for large n when not already inside a parallel region.
  Auto,
};

inline constexpr Eigen::Index kBlockRows = 512;
inline constexpr Eigen::Index kAutoParallelRows = 4096;

// w_i = exp(-beta/2 * (x_i - center)' precision (x_i - center)).
// Rows of x are observations.
namespace serial {
Vector dpd_weights(const Matrix& x, const Vector& center, const Matrix& precision,
                   double beta);
Vector weighted_mean(const Matrix& x, const Vector& w);
// sum_i w_i (x_i - center)(x_i - center)' (not normalized).
Matrix weighted_cross(const Matrix& x, const Vector& w, const Vector& center);
}  // namespace serial

namespace omp {
Vector dpd_weights(const Matrix& x, const Vector& center, const Matrix& precision,
                   double beta);
Vector weighted_mean(const Matrix& x, const Vector& w);
Matrix weighted_cross(const Matrix& x, const Vector& w, const Vector& center);
}  // namespace omp

bool use_parallel(Exec exec, Eigen::Index rows);

inline Vector dpd_weights(const Matrix& x, const Vector& center, const Matrix& precision,
                          double beta, Exec exec = Exec::Auto) {
  return use_parallel(exec, x.rows()) ? omp::dpd_weights(x, center, precision, beta)
                                      : serial::dpd_weights(x, center, precision, beta);
}

inline Vector weighted_mean(const Matrix& x, const Vector& w, Exec exec = Exec::Auto) {
  return use_parallel(exec, x.rows()) ? omp::weighted_mean(x, w)
                                      : serial::weighted_mean(x, w);
}

inline Matrix weighted_cross(const Matrix& x, const Vector& w, const Vector& center,
                             Exec exec = Exec::Auto) {
  return use_parallel(exec, x.rows()) ? omp::weighted_cross(x, w, center)
                                      : serial::weighted_cross(x, w, center);
}

}  // namespace rao::kernels
