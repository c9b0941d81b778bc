#pragma once

// Restricted minimum-DPD estimators of (mu, Lambda) under correlation nulls.
//
// Every solver runs the same alternation, starting from the beta = 0 closed
// forms:
//   1. weights w_i at the current (mu, Lambda) and null correlation,
//   2. mu <- sum w_i x_i / sum w_i,
//   3. S  <- sum w_i (x_i - mu)(x_i - mu)' / (n kappa0),
//   4. variances from the null-specific diagonal system in S,
// until the largest relative change of (mu, sigma^2[, rho]) falls below
// the tolerance. At beta = 0 the weights are constant and the loop stops
// after one confirming pass.

#include <optional>
#include <vector>

#include "rao/gaussian_dpd.hpp"

namespace rao {

struct FitConfig {
  double tolerance = 1e-10;
  int max_iterations = 500;
  // Initial relaxation factor; halved automatically (down to 1/64) when
  // the iteration starts to oscillate.
  double damping = 1.0;
  kernels::Exec exec = kernels::Exec::Auto;

  void validate() const;
};

struct RestrictedFit {
  double beta = 0.0;
  Vector mu_tilde;
  Vector sigma2_tilde;
  Matrix r_tilde;                   // R_{X,beta} at the fitted (mu, Lambda)
  Matrix null_corr;                 // correlation matrix used in the weights
  std::optional<double> rho_tilde;  // free equicorrelation only
  double kappa0_tilde = 0.0;
  Vector weights;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  std::vector<double> trace;  // residual per iteration

  int n() const noexcept { return static_cast<int>(weights.size()); }
  int p() const noexcept { return static_cast<int>(mu_tilde.size()); }
};

RestrictedFit fit_given_correlation(const Sample& x, const SymMatrix& r0, double beta,
                                    const FitConfig& cfg = {});

RestrictedFit fit_equicorr_fixed(const Sample& x, double rho0, double beta,
                                 const FitConfig& cfg = {});

RestrictedFit fit_independence(const Sample& x, double beta, const FitConfig& cfg = {});

RestrictedFit fit_equicorr_free(const Sample& x, double beta, const FitConfig& cfg = {});

// Pearson correlation matrix (n-denominator moments). Throws
// DegeneracyError on a zero-variance column.
Matrix pearson_correlation(const Sample& x);

}  // namespace rao
