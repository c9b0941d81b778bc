#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner. Nothing here calls the closed forms under test.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>

#include "rao/gaussian_dpd.hpp"

namespace oracle {

using rao::Matrix;
using rao::Vector;

inline Matrix random_spd(int p, std::mt19937_64& rng, double jitter = 0.5) {
  std::normal_distribution<double> z;
  Matrix a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = z(rng);
  Matrix s = a * a.transpose() / p;
  s.diagonal().array() += jitter;
  return s;
}

inline Matrix random_corr(int p, std::mt19937_64& rng, double jitter = 0.5) {
  const Matrix s = random_spd(p, rng, jitter);
  const Vector d = s.diagonal().cwiseSqrt().cwiseInverse();
  Matrix r = d.asDiagonal() * s * d.asDiagonal();
  r.diagonal().setOnes();
  return 0.5 * (r + r.transpose());
}

inline rao::GaussianParams random_params(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.5, 2.5);
  Vector mu(p), lambda(p);
  for (int j = 0; j < p; ++j) {
    mu[j] = z(rng);
    lambda[j] = u(rng);
  }
  return rao::GaussianParams(mu, lambda, random_corr(p, rng));
}

// n x p normal sample with correlation r, unit variances and zero mean.
inline Matrix normal_sample(int n, const Matrix& r, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  const Matrix l = Eigen::LLT<Matrix>(r).matrixL();
  Matrix x(n, r.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r.rows(); ++j) x(i, j) = z(rng);
  return x * l.transpose();
}

// Textbook Pearson correlation with explicit sums.
inline Matrix pearson(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  Vector mean = Vector::Zero(p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) mean[j] += x(i, j) / n;
  Matrix r(p, p);
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      double sab = 0, saa = 0, sbb = 0;
      for (int i = 0; i < n; ++i) {
        const double da = x(i, a) - mean[a];
        const double db = x(i, b) - mean[b];
        sab += da * db;
        saa += da * da;
        sbb += db * db;
      }
      r(a, b) = sab / std::sqrt(saa * sbb);
    }
  }
  return r;
}

// sum_{i<j} r_ij^2
inline double sum_sq_off_diagonal(const Matrix& r) {
  double s = 0.0;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = i + 1; j < r.cols(); ++j) s += r(i, j) * r(i, j);
  return s;
}

// Integral of g(x) over R^p (p = 1 or 2) by the trapezoid rule on the
// whitened grid x = mu + L z, z in [-half_width, half_width]^p. The
// trapezoid rule converges geometrically for smooth Gaussian-tailed
// integrands, so a modest step already reaches 1e-10.
inline Matrix integrate(const rao::GaussianParams& params,
                        const std::function<Matrix(const Vector&)>& g, double step = 0.04,
                        double half_width = 9.0) {
  const int p = params.dim();
  const Matrix l = Eigen::LLT<Matrix>(params.sigma()).matrixL();
  const double jac = l.diagonal().prod() * std::pow(step, p);
  const int m = static_cast<int>(std::round(2.0 * half_width / step));
  Matrix acc;
  Vector z(p);
  auto add = [&](const Vector& zz) {
    const Matrix v = g(params.mu() + l * zz);
    if (acc.size() == 0) acc = Matrix::Zero(v.rows(), v.cols());
    acc += v;
  };
  if (p == 1) {
    for (int i = 0; i <= m; ++i) {
      z[0] = -half_width + i * step;
      add(z);
    }
  } else {
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        z[0] = -half_width + i * step;
        z[1] = -half_width + j * step;
        add(z);
      }
    }
  }
  return acc * jac;
}

inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

// ||a - b||_max / max(1, ||b||_max)
inline double rel_err(const Matrix& a, const Matrix& b) {
  return max_abs(a - b) / std::max(1.0, max_abs(b));
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Sample whose n-denominator Pearson matrix is exactly r (up to roundoff).
inline Matrix sample_with_correlation(int n, const Matrix& r, std::mt19937_64& rng) {
  std::normal_distribution<double> zd;
  const int p = static_cast<int>(r.rows());
  Matrix z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = zd(rng);
  z.rowwise() -= z.colwise().mean();
  const Matrix s = z.transpose() * z / n;
  const Matrix ls = Eigen::LLT<Matrix>(s).matrixL();
  const Matrix white = ls.triangularView<Eigen::Lower>().solve(z.transpose()).transpose();
  const Matrix lr = Eigen::LLT<Matrix>(r).matrixL();
  return white * lr.transpose();
}

// Central difference of log_density along a symmetric perturbation of Sigma.
inline Vector fd_score_vech(const Vector& x, const rao::GaussianParams& params) {
  const int p = params.dim();
  const Matrix sigma = params.sigma();
  Vector out(rao::vech_size(p));
  for (int j = 0; j < p; ++j) {
    for (int i = j; i < p; ++i) {
      const double h = 1e-5 * std::sqrt(sigma(i, i) * sigma(j, j));
      Matrix plus = sigma, minus = sigma;
      plus(i, j) += h;
      minus(i, j) -= h;
      if (i != j) {
        plus(j, i) += h;
        minus(j, i) -= h;
      }
      const double lp = rao::log_density(x, rao::GaussianParams::from_covariance(params.mu(), plus));
      const double lm = rao::log_density(x, rao::GaussianParams::from_covariance(params.mu(), minus));
      out[rao::vech_index(i, j, p)] = (lp - lm) / (2 * h);
    }
  }
  return out;
}

inline Vector fd_score_mu(const Vector& x, const rao::GaussianParams& params) {
  const int p = params.dim();
  Vector out(p);
  for (int j = 0; j < p; ++j) {
    const double h = 1e-5 * std::sqrt(params.lambda()[j]);
    Vector mp = params.mu(), mm = params.mu();
    mp[j] += h;
    mm[j] -= h;
    out[j] = (rao::log_density(x, rao::GaussianParams(mp, params.lambda(), params.corr())) -
              rao::log_density(x, rao::GaussianParams(mm, params.lambda(), params.corr()))) /
             (2 * h);
  }
  return out;
}

// Stacks E[s s' f^beta], E[s f^beta], E[s s' f^{2 beta}] as columns of one
// matrix so a single quadrature pass serves all three.
struct Integrals {
  Matrix j;
  Vector xi;
  Matrix j2;
};

inline Integrals integrate_expectations(const rao::GaussianParams& params, double beta) {
  const int m = params.dim() + rao::vech_size(params.dim());
  const Matrix all = integrate(params, [&](const Vector& x) {
    Vector s(m);
    s << rao::score_mu(x, params), rao::score_vech_sigma(x, params);
    const double lf = rao::log_density(x, params);
    Matrix out(m, 2 * m + 1);
    out.leftCols(m) = s * s.transpose() * std::exp((beta + 1) * lf);
    out.col(m) = s * std::exp((beta + 1) * lf);
    out.rightCols(m) = s * s.transpose() * std::exp((2 * beta + 1) * lf);
    return out;
  }, 0.1);
  return {all.leftCols(m), all.col(m), all.rightCols(m)};
}

}  // namespace oracle
