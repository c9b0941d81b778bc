#include "rao/gaussian_dpd.hpp"

#include <cmath>
#include <sstream>

#include "rao/errors.hpp"

namespace rao {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2 pi)
constexpr double kUnitDiagonalTolerance = 1e-10;

// G' vec(A) for symmetric A: diagonal entries once, off-diagonal twice.
Vector gt_vec_sym(const Matrix& a) {
  const int p = static_cast<int>(a.rows());
  Vector out(vech_size(p));
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i)
      out[vech_index(i, j, p)] = i == j ? a(i, i) : a(i, j) + a(j, i);
  return out;
}

// G' B G for a p^2 x p^2 matrix B.
Matrix gt_b_g(const Matrix& b, int p) {
  const SparseMatrix g = duplication_matrix(p).entries;
  const Matrix bg = b * g;
  return Matrix(g.transpose() * bg);
}

void require_sample(const Sample& x, int p, const char* what) {
  if (x.cols() != p) {
    std::ostringstream os;
    os << what << ": sample has " << x.cols() << " columns, parameters have dimension " << p;
    throw StructuralError(os.str());
  }
  if (x.rows() < 1) throw DegeneracyError(std::string(what) + ": empty sample");
}

}  // namespace

CovFactor::CovFactor(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw StructuralError("Cholesky factorization needs a non-empty square matrix");
  llt_.compute(a);
  if (llt_.info() != Eigen::Success)
    throw FactorizationError("matrix is not positive definite (Cholesky failed)");
  const Matrix& l = llt_.matrixLLT();
  double ld = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0) || !std::isfinite(d))
      throw FactorizationError("matrix is not positive definite (Cholesky failed)");
    ld += std::log(d);
  }
  log_det_ = 2.0 * ld;
}

Matrix CovFactor::inverse() const {
  const Eigen::Index p = llt_.rows();
  Matrix inv = llt_.solve(Matrix::Identity(p, p));
  return 0.5 * (inv + inv.transpose());
}

double CovFactor::mahalanobis_sq(const Vector& d) const {
  const Vector z = llt_.matrixL().solve(d);
  return z.squaredNorm();
}

GaussianParams::GaussianParams(Vector mu, Vector lambda, Matrix corr)
    : mu_(std::move(mu)), lambda_(std::move(lambda)) {
  const Eigen::Index p = mu_.size();
  if (p < 1) throw StructuralError("parameters need dimension p >= 1");
  if (lambda_.size() != p || corr.rows() != p || corr.cols() != p) {
    std::ostringstream os;
    os << "parameter dimensions disagree: mu " << p << ", lambda " << lambda_.size()
       << ", corr " << corr.rows() << "x" << corr.cols();
    throw StructuralError(os.str());
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(lambda_[j] > 0.0) || !std::isfinite(lambda_[j])) {
      std::ostringstream os;
      os << "variance " << j + 1 << " must be positive, got " << lambda_[j];
      throw DomainError(os.str());
    }
    if (std::abs(corr(j, j) - 1.0) > kUnitDiagonalTolerance) {
      std::ostringstream os;
      os << "correlation matrix diagonal entry " << j + 1 << " is " << corr(j, j)
         << ", expected 1";
      throw StructuralError(os.str());
    }
  }
  corr_ = SymMatrix(corr).matrix();
  corr_.diagonal().setOnes();
  CovFactor check(corr_);
  (void)check;
}

GaussianParams GaussianParams::from_covariance(const Vector& mu, const Matrix& sigma) {
  const SymMatrix s(sigma);
  const Vector lambda = s.matrix().diagonal();
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    if (!(lambda[j] > 0.0)) throw DomainError("covariance has a nonpositive variance");
  const Vector inv_sd = lambda.cwiseSqrt().cwiseInverse();
  Matrix r = inv_sd.asDiagonal() * s.matrix() * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return GaussianParams(mu, lambda, r);
}

GaussianParams GaussianParams::standard(int p) {
  return GaussianParams(Vector::Zero(p), Vector::Ones(p), Matrix::Identity(p, p));
}

Matrix GaussianParams::sigma() const {
  const Vector sd = lambda_.cwiseSqrt();
  return sd.asDiagonal() * corr_ * sd.asDiagonal();
}

KappaSet kappa_constants(int p, double beta) {
  if (p < 1) throw DomainError("kappa constants need p >= 1");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw DomainError("beta must be a finite nonnegative number");
  KappaSet k;
  k.p = p;
  k.beta = beta;
  const double half = 0.5 * p;
  const double a = std::pow(2.0 * beta + 1.0, -half - 2.0);
  k.kappa1 = 2.0 * a;
  k.kappa2 = beta * beta * (4.0 * a - std::pow(beta + 1.0, -(p + 2.0)));
  k.kappa3 = k.kappa2 / k.kappa1;
  k.xi_offset = beta * std::pow(beta + 1.0, -(half + 1.0));
  return k;
}

double log_dpd_scale(int p, double log_det_sigma, double beta) {
  return -0.5 * beta * (p * kLog2Pi + log_det_sigma);
}

double log_density(const Vector& x, const GaussianParams& params) {
  const int p = params.dim();
  const CovFactor f(params.sigma());
  return -0.5 * (p * kLog2Pi + f.log_det() + f.mahalanobis_sq(x - params.mu()));
}

double dpd_weight(const Vector& x, const GaussianParams& params, double beta) {
  if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
  if (beta == 0.0) return 1.0;
  const CovFactor f(params.sigma());
  return std::exp(-0.5 * beta * f.mahalanobis_sq(x - params.mu()));
}

Vector score_mu(const Vector& x, const GaussianParams& params) {
  const CovFactor f(params.sigma());
  return f.solve(Vector(x - params.mu()));
}

Vector score_vech_sigma(const Vector& x, const GaussianParams& params) {
  const CovFactor f(params.sigma());
  const Vector v = f.solve(Vector(x - params.mu()));
  const Matrix a = 0.5 * (v * v.transpose() - f.inverse());
  return gt_vec_sym(a);
}

Matrix ThetaBlocks::full() const {
  const Eigen::Index p = mu_block.rows();
  const Eigen::Index m = vech_block.rows();
  Matrix out = Matrix::Zero(p + m, p + m);
  out.topLeftCorner(p, p) = mu_block;
  out.bottomRightCorner(m, m) = vech_block;
  return out;
}

Vector ThetaVector::full() const {
  Vector out(mu_block.size() + vech_block.size());
  out << mu_block, vech_block;
  return out;
}

ThetaBlocks j_beta(const GaussianParams& params, double beta) {
  const int p = params.dim();
  const CovFactor f(params.sigma());
  const Matrix s = f.inverse();
  const double logc = log_dpd_scale(p, f.log_det(), beta);
  const Vector vs = detail::vec(s);

  ThetaBlocks j;
  j.mu_block = std::exp(logc - (0.5 * p + 1.0) * std::log1p(beta)) * s;
  const Matrix inner = beta * beta * (vs * vs.transpose()) + 2.0 * detail::kron(s, s);
  j.vech_block =
      std::exp(logc - (0.5 * p + 2.0) * std::log1p(beta) - std::log(4.0)) * gt_b_g(inner, p);
  return j;
}

ThetaVector xi_beta(const GaussianParams& params, double beta) {
  const int p = params.dim();
  const CovFactor f(params.sigma());
  const double logc = log_dpd_scale(p, f.log_det(), beta);
  ThetaVector xi;
  xi.mu_block = Vector::Zero(p);
  const double scale = -0.5 * beta * std::exp(logc - (0.5 * p + 1.0) * std::log1p(beta));
  xi.vech_block = scale * gt_vec_sym(f.inverse());
  return xi;
}

ThetaBlocks k_beta(const GaussianParams& params, double beta) {
  const int p = params.dim();
  const CovFactor f(params.sigma());
  const Matrix s = f.inverse();
  const double logc = log_dpd_scale(p, f.log_det(), beta);
  ThetaBlocks out;
  out.mu_block = std::exp(2.0 * logc - (0.5 * p + 1.0) * std::log1p(2.0 * beta)) * s;
  out.vech_block = 0.25 * std::exp(2.0 * logc) * gt_b_g(dpd_kernel(s, beta), p);
  return out;
}

Matrix dpd_kernel(const Matrix& a, double beta) {
  const int p = static_cast<int>(a.rows());
  const KappaSet k = kappa_constants(p, beta);
  const Vector va = detail::vec(a);
  return k.kappa1 * detail::kron(a, a) + k.kappa2 * (va * va.transpose());
}

Matrix dpd_kernel_inverse(const Matrix& r0, double beta) {
  const int p = static_cast<int>(r0.rows());
  const KappaSet k = kappa_constants(p, beta);
  const Vector vr = detail::vec(r0);
  return (detail::kron(r0, r0) - (k.kappa3 / (1.0 + p * k.kappa3)) * (vr * vr.transpose())) /
         k.kappa1;
}

Matrix k_beta_corr_inverse(const Vector& lambda, const Matrix& r0, double beta) {
  const int p = static_cast<int>(r0.rows());
  if (lambda.size() != p) throw StructuralError("lambda and R0 dimensions disagree");
  const CovFactor fr(r0);
  double log_det_lambda = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(lambda[j] > 0.0)) throw DomainError("variances must be positive");
    log_det_lambda += std::log(lambda[j]);
  }
  // 4 / c^2 with c = (2 pi)^{-beta p/2} |Sigma|^{-beta/2}, |Sigma| = |Lambda||R0|.
  const double log_pref =
      std::log(4.0) - 2.0 * log_dpd_scale(p, log_det_lambda + fr.log_det(), beta);

  Matrix kinv = dpd_kernel_inverse(r0, beta);
  const Vector sd = lambda.cwiseSqrt();
  Vector d(p * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i) d[j * p + i] = sd[i] * sd[j];
  kinv = d.asDiagonal() * kinv * d.asDiagonal();

  const SparseMatrix l = elimination_matrix(p).entries;
  const Matrix lk = l * kinv;
  const Matrix lt = Matrix(l.transpose());
  return std::exp(log_pref) * (lk * lt);
}

WeightedScatter weighted_scatter_with_precision(const Sample& x, const Vector& mu,
                                                const Vector& lambda,
                                                const Matrix& precision, double beta,
                                                kernels::Exec exec) {
  const int p = static_cast<int>(mu.size());
  require_sample(x, p, "weighted_scatter");
  if (x.rows() < 2) throw DegeneracyError("weighted scatter needs n >= 2");
  const KappaSet k = kappa_constants(p, beta);
  const double n = static_cast<double>(x.rows());

  WeightedScatter ws;
  ws.weights = kernels::dpd_weights(x, mu, precision, beta, exec);
  ws.weight_mean = ws.weights.sum() / n;
  ws.kappa0_tilde = ws.weight_mean - k.xi_offset;
  if (!(ws.kappa0_tilde > 0.0)) {
    std::ostringstream os;
    os << "kappa0 = " << ws.kappa0_tilde << " <= 0: mean weight " << ws.weight_mean
       << " does not exceed the offset " << k.xi_offset << "; beta = " << beta
       << " down-weights essentially the whole sample";
    throw DegeneracyError(os.str());
  }
  ws.s_matrix = kernels::weighted_cross(x, ws.weights, mu, exec) / (n * ws.kappa0_tilde);
  const Vector inv_sd = lambda.cwiseSqrt().cwiseInverse();
  ws.r_matrix = inv_sd.asDiagonal() * ws.s_matrix * inv_sd.asDiagonal();
  return ws;
}

WeightedScatter weighted_scatter(const Sample& x, const Vector& mu, const Vector& lambda,
                                 const Matrix& r0, double beta, kernels::Exec exec) {
  const GaussianParams params(mu, lambda, r0);
  const CovFactor f(params.sigma());
  return weighted_scatter_with_precision(x, mu, lambda, f.inverse(), beta, exec);
}

ThetaVector u_beta_n(const Sample& x, const GaussianParams& params, double beta) {
  const int p = params.dim();
  require_sample(x, p, "u_beta_n");
  const CovFactor f(params.sigma());
  const Matrix s = f.inverse();
  const double c = std::exp(log_dpd_scale(p, f.log_det(), beta));
  const KappaSet k = kappa_constants(p, beta);
  const double n = static_cast<double>(x.rows());

  const Vector w = kernels::dpd_weights(x, params.mu(), s, beta);
  Vector wd = Vector::Zero(p);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    wd += w[i] * (x.row(i).transpose() - params.mu());
  const Matrix cross = kernels::weighted_cross(x, w, params.mu());

  ThetaVector u;
  u.mu_block = c * s * (wd / n);
  const double kappa0 = w.sum() / n - k.xi_offset;
  const Matrix a = 0.5 * c * (s * (cross / n) * s - kappa0 * s);
  u.vech_block = gt_vec_sym(a);
  return u;
}

Vector v_beta_n(const Sample& x, const GaussianParams& params, double beta) {
  const int p = params.dim();
  require_sample(x, p, "v_beta_n");
  const CovFactor f(params.sigma());
  const Matrix s = f.inverse();
  const double c = std::exp(log_dpd_scale(p, f.log_det(), beta));
  const KappaSet k = kappa_constants(p, beta);
  const double n = static_cast<double>(x.rows());

  Vector acc = Vector::Zero(static_cast<Eigen::Index>(p) * p);
  double wsum = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector v = s * (x.row(i).transpose() - params.mu());
    const double w = beta == 0.0 ? 1.0 : std::exp(-0.5 * beta * v.dot(x.row(i).transpose() - params.mu()));
    wsum += w;
    for (int b = 0; b < p; ++b)
      for (int a = 0; a < p; ++a) acc[b * p + a] += w * v[a] * v[b];
  }
  const double kappa0 = wsum / n - k.xi_offset;
  return 0.5 * c * (acc / n - kappa0 * detail::vec(s));
}

Vector v_beta_n_corr(const Sample& x, const Vector& mu, const Vector& lambda,
                     const Matrix& r0, double beta) {
  const int p = static_cast<int>(mu.size());
  const GaussianParams params(mu, lambda, r0);
  const CovFactor fs(params.sigma());
  const WeightedScatter ws =
      weighted_scatter_with_precision(x, mu, lambda, fs.inverse(), beta, kernels::Exec::Auto);
  const CovFactor fr(r0);
  const Matrix a = fr.inverse();
  const double c = std::exp(log_dpd_scale(p, fs.log_det(), beta));
  const Vector inv_sd = lambda.cwiseSqrt().cwiseInverse();
  const Matrix core = inv_sd.asDiagonal() * (a * (ws.r_matrix - r0) * a) * inv_sd.asDiagonal();
  return 0.5 * ws.kappa0_tilde * c * detail::vec(core);
}

Matrix EtaBlocks::transform() const {
  const int m = vech_size(p);
  Matrix t(m, m);
  t.topRows(p) = Matrix(variances.transpose());
  t.bottomRows(m - p) = scale.asDiagonal() * Matrix(covariances.transpose());
  return t;
}

Vector EtaBlocks::score(const Vector& u_theta2) const { return transform() * u_theta2; }

Vector EtaBlocks::correlation_score(const Vector& u_theta2) const {
  return scale.asDiagonal() * (covariances.transpose() * u_theta2);
}

Matrix EtaBlocks::information(const Matrix& m_theta2) const {
  const Matrix t = transform();
  return t * m_theta2 * t.transpose();
}

EtaBlocks eta_blocks(const GaussianParams& params) {
  const int p = params.dim();
  const StructMatrix m = reorder_permutation(p);
  EtaBlocks e;
  e.p = p;
  e.variances = m.variance_block();
  e.covariances = m.covariance_block();
  const Vector sd = params.sd();
  e.scale.resize(vecl_size(p));
  int s = 0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) e.scale[s++] = sd[i] * sd[j];
  return e;
}

}  // namespace rao
