#pragma once

// Density-power-divergence machinery for the p-variate normal model
// N_p(mu, Sigma), Sigma = Lambda^{1/2} R Lambda^{1/2}.
//
// Parameter vector theta = (mu', vech(Sigma)')'. Score, information-type
// matrices and beta-score statistics are all expressed in those
// coordinates; the correlation-scale blocks (eta coordinates) are obtained
// through eta_blocks().
//
// The constant (2 pi)^{-beta p / 2} |Sigma|^{-beta/2} shows up everywhere.
// It is carried as a logarithm (log_dpd_scale) and exponentiated only
// after being combined with the other factors.

#include <Eigen/Cholesky>

#include "rao/kernels.hpp"
#include "rao/matrix_ops.hpp"

namespace rao {

using Sample = Eigen::MatrixXd;  // n x p, rows are observations

// Cholesky factor of a covariance or correlation matrix.
class CovFactor {
 public:
  explicit CovFactor(const Matrix& a);

  int dim() const noexcept { return static_cast<int>(llt_.rows()); }
  double log_det() const noexcept { return log_det_; }
  Matrix inverse() const;
  Vector solve(const Vector& v) const { return llt_.solve(v); }
  Matrix solve(const Matrix& m) const { return llt_.solve(m); }
  double mahalanobis_sq(const Vector& d) const;

 private:
  Eigen::LLT<Matrix> llt_;
  double log_det_ = 0.0;
};

class GaussianParams {
 public:
  // Validates: lambda > 0, corr symmetric with unit diagonal and positive
  // definite, sizes agree.
  GaussianParams(Vector mu, Vector lambda, Matrix corr);

  static GaussianParams from_covariance(const Vector& mu, const Matrix& sigma);
  static GaussianParams standard(int p);

  int dim() const noexcept { return static_cast<int>(mu_.size()); }
  const Vector& mu() const noexcept { return mu_; }
  const Vector& lambda() const noexcept { return lambda_; }
  const Matrix& corr() const noexcept { return corr_; }
  Vector sd() const { return lambda_.cwiseSqrt(); }
  Matrix sigma() const;

 private:
  Vector mu_;
  Vector lambda_;
  Matrix corr_;
};

struct KappaSet {
  int p = 0;
  double beta = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  // kappa1^{-1} kappa2; see kernel_inverse.
  double kappa3 = 0.0;
  // beta (beta+1)^{-(p/2+1)}, subtracted from the mean weight to get kappa0.
  double xi_offset = 0.0;
};

KappaSet kappa_constants(int p, double beta);

// log[(2 pi)^{-beta p/2} |Sigma|^{-beta/2}].
double log_dpd_scale(int p, double log_det_sigma, double beta);

double log_density(const Vector& x, const GaussianParams& params);
double dpd_weight(const Vector& x, const GaussianParams& params, double beta);
Vector score_mu(const Vector& x, const GaussianParams& params);
Vector score_vech_sigma(const Vector& x, const GaussianParams& params);

// Block-diagonal matrix in theta coordinates.
struct ThetaBlocks {
  Matrix mu_block;    // p x p
  Matrix vech_block;  // p(p+1)/2 x p(p+1)/2

  Matrix full() const;
};

struct ThetaVector {
  Vector mu_block;
  Vector vech_block;

  Vector full() const;
};

// J_beta = E[s s' f^beta].
ThetaBlocks j_beta(const GaussianParams& params, double beta);

// xi_beta = E[s f^beta]; the mu block is identically zero.
ThetaVector xi_beta(const GaussianParams& params, double beta);

// K_beta = J_{2 beta} - xi_beta xi_beta', assembled from the kappa form.
ThetaBlocks k_beta(const GaussianParams& params, double beta);

// kappa1 (A kron A) + kappa2 vec(A) vec(A)' for A = R0^{-1} (p^2 x p^2).
Matrix dpd_kernel(const Matrix& r0_inverse, double beta);

// Closed-form inverse of dpd_kernel(R0^{-1}, beta) by the rank-one
// Woodbury update:
//   kappa1^{-1} [ (R0 kron R0) - kappa3 vec(R0) vec(R0)' / (1 + p kappa3) ].
Matrix dpd_kernel_inverse(const Matrix& r0, double beta);

// Inverse of the vech(Sigma) block of K_beta at Sigma = Lambda^{1/2} R0
// Lambda^{1/2}, built from dpd_kernel_inverse and the Moore-Penrose
// elimination matrix.
Matrix k_beta_corr_inverse(const Vector& lambda, const Matrix& r0, double beta);

struct WeightedScatter {
  Matrix s_matrix;  // S_{X,beta}
  Matrix r_matrix;  // Lambda^{-1/2} S Lambda^{-1/2}
  double kappa0_tilde = 0.0;
  Vector weights;
  double weight_mean = 0.0;
};

// Weighted scatter at (mu, Lambda) with weights computed under
// Sigma = Lambda^{1/2} R0 Lambda^{1/2}. Throws DegeneracyError when
// kappa0 <= 0.
WeightedScatter weighted_scatter(const Sample& x, const Vector& mu, const Vector& lambda,
                                 const Matrix& r0, double beta,
                                 kernels::Exec exec = kernels::Exec::Auto);

// Same, with the precision matrix Sigma^{-1} supplied by the caller.
WeightedScatter weighted_scatter_with_precision(const Sample& x, const Vector& mu,
                                                const Vector& lambda,
                                                const Matrix& precision, double beta,
                                                kernels::Exec exec = kernels::Exec::Auto);

// beta-score statistic U_{beta,n}(theta) = mean_i(s(X_i) f^beta(X_i)) - xi_beta,
// stacked as (mu block, vech block).
ThetaVector u_beta_n(const Sample& x, const GaussianParams& params, double beta);

// V_{beta,n}(vec Sigma), so that the vech block of U is G' V. Evaluated
// directly from the per-observation Kronecker sums.
Vector v_beta_n(const Sample& x, const GaussianParams& params, double beta);

// V_{beta,n} at Sigma = Lambda^{1/2} R0 Lambda^{1/2} expressed through the
// weighted correlation matrix R_{X,beta}:
//   (kappa0 c / 2) (Lambda^{-1/2} kron Lambda^{-1/2}) (R0^{-1} kron R0^{-1})
//   [vec(R_{X,beta}) - vec(R0)],   c = (2 pi)^{-beta p/2} |Sigma|^{-beta/2}.
Vector v_beta_n_corr(const Sample& x, const Vector& mu, const Vector& lambda,
                     const Matrix& r0, double beta);

// Reparameterization from theta_2 = vech(Sigma) to
// eta_2 = (variances, vecl(R)).
struct EtaBlocks {
  int p = 0;
  Vector scale;              // diag{sigma_i sigma_j}, pairs in vecl order
  SparseMatrix variances;    // P
  SparseMatrix covariances;  // Q

  // T' with U(eta_2) = T' U(theta_2); rows are (P', D Q').
  Matrix transform() const;
  Vector score(const Vector& u_theta2) const;
  // D Q' U(theta_2), the correlation block alone.
  Vector correlation_score(const Vector& u_theta2) const;
  // T' M T for a theta_2 matrix (J or K).
  Matrix information(const Matrix& m_theta2) const;
};

EtaBlocks eta_blocks(const GaussianParams& params);

}  // namespace rao
