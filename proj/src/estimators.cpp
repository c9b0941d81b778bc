#include "rao/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "rao/errors.hpp"

namespace rao {

namespace {

constexpr int kMaxInnerSweeps = 500;
constexpr double kInnerTolerance = 1e-15;

enum class Null { Given, EquiFixed, Independence, EquiFree };

constexpr double kMinDamping = 1.0 / 64.0;

struct State {
  Vector mu;
  Vector sigma2;
  double rho = 0.0;
};

void validate_sample(const Sample& x, const char* what) {
  if (x.rows() < 2) {
    std::ostringstream os;
    os << what << ": need n >= 2 observations, got " << x.rows();
    throw DegeneracyError(os.str());
  }
  if (x.cols() < 1) throw StructuralError(std::string(what) + ": sample has no columns");
  if (!x.allFinite()) throw DataError(std::string(what) + ": sample contains non-finite values");
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (x.col(j).maxCoeff() == x.col(j).minCoeff()) {
      std::ostringstream os;
      os << what << ": column " << j + 1 << " is constant (zero variance)";
      throw DegeneracyError(os.str());
    }
  }
}

void check_variances(const Vector& s2) {
  for (Eigen::Index j = 0; j < s2.size(); ++j) {
    if (!(s2[j] > 0.0) || !std::isfinite(s2[j])) {
      std::ostringstream os;
      os << "column " << j + 1
         << " has zero weighted variance: the weights collapsed onto a single observation "
            "(beta is too large for this n and p)";
      throw DegeneracyError(os.str());
    }
  }
}

// Positive root of a t^2 + b t - c = 0 with a, c > 0, written to avoid
// cancellation.
double positive_root(double a, double b, double c) {
  const double disc = std::sqrt(b * b + 4.0 * a * c);
  return b <= 0.0 ? (disc - b) / (2.0 * a) : (2.0 * c) / (disc + b);
}

// Solves tau_j (B tau)_j = 1 for tau > 0, B = A o S, by exact coordinate
// minimization of 1/2 tau' B tau - sum log tau_j (strictly convex whenever
// B is positive definite, which holds for PD A and S with positive
// diagonal). tau holds the starting point and receives the solution.
void solve_variance_system(const Matrix& b, Vector& tau) {
  const Eigen::Index p = b.rows();
  Vector bt = b * tau;
  for (int sweep = 0; sweep < kMaxInnerSweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double bjj = b(j, j);
      const double cj = bt[j] - bjj * tau[j];
      const double t = positive_root(bjj, cj, 1.0);
      const double delta = t - tau[j];
      if (delta != 0.0) {
        bt += delta * b.col(j);
        change = std::max(change, std::abs(delta) / t);
        tau[j] = t;
      }
    }
    if (change <= kInnerTolerance) break;
  }
}

// Fixed equicorrelation: R0^{-1} = (I - c 11')/(1 - rho0), so
// tau_j (R0^{-1} o S tau)_j = 1 becomes
//   S_jj (1 - c) tau_j^2 - c tau_j sum_{k != j} S_kj tau_k - (1 - rho0) = 0.
void solve_equicorr_system(const Matrix& s, double rho0, Vector& tau) {
  const Eigen::Index p = s.rows();
  const double c = rho0 / (1.0 + (p - 1) * rho0);
  Vector st = s * tau;
  for (int sweep = 0; sweep < kMaxInnerSweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double off = st[j] - s(j, j) * tau[j];
      const double t = positive_root(s(j, j) * (1.0 - c), -c * off, 1.0 - rho0);
      const double delta = t - tau[j];
      if (delta != 0.0) {
        st += delta * s.col(j);
        change = std::max(change, std::abs(delta) / t);
        tau[j] = t;
      }
    }
    if (change <= kInnerTolerance) break;
  }
}

double mean_off_diagonal(const Matrix& r) {
  const Eigen::Index p = r.rows();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j + 1; i < p; ++i) sum += r(i, j);
  return sum / (0.5 * p * (p - 1));
}

void check_rho(double rho, int p) {
  const double lo = equicorr_lower_bound(p);
  if (!(rho > lo && rho < 1.0)) {
    std::ostringstream os;
    os << "estimated equicorrelation " << rho << " is outside the admissible interval (" << lo
       << ", 1) for p = " << p;
    throw ValidityError(os.str());
  }
}

Matrix unit_diagonal_scale(const Matrix& s) {
  const Vector inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
  Matrix r = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return r;
}

class Solver {
 public:
  Solver(const Sample& x, Null kind, const Matrix& r0, double rho0, double beta,
         const FitConfig& cfg)
      : x_(x), kind_(kind), r0_(r0), rho0_(rho0), beta_(beta), cfg_(cfg) {
    p_ = static_cast<int>(x.cols());
    n_ = static_cast<double>(x.rows());
    if (kind_ == Null::Given) r0_inv_ = CovFactor(r0_).inverse();
    if (kind_ == Null::EquiFixed) r0_inv_ = equicorr_inverse(rho0_, p_).matrix();
  }

  RestrictedFit run() {
    State st = initial_state();
    RestrictedFit fit;
    fit.beta = beta_;
    damping_ = cfg_.damping;
    Vector last_delta;
    for (int it = 1; it <= cfg_.max_iterations; ++it) {
      State next = step(st);
      damp(st, next);
      const double res = change(st, next);
      fit.trace.push_back(res);
      // A step that reverses the previous one without halving the residual
      // signals a cycle of the undamped map: damp harder.
      const Vector delta = (next.sigma2 - st.sigma2).cwiseQuotient(st.sigma2);
      const std::size_t t = fit.trace.size();
      if (t >= 3 && delta.dot(last_delta) < 0.0 && res > 0.5 * fit.trace[t - 3] &&
          damping_ > kMinDamping)
        damping_ *= 0.5;
      last_delta = delta;
      st = std::move(next);
      if (res <= cfg_.tolerance) {
        fit.iterations = it;
        fit.converged = true;
        fit.residual = res;
        finish(st, fit);
        return fit;
      }
    }
    std::ostringstream os;
    os << "fixed-point iteration did not converge in " << cfg_.max_iterations
       << " iterations (last relative change " << (fit.trace.empty() ? 0.0 : fit.trace.back())
       << ", beta = " << beta_ << ")";
    throw ConvergenceError(os.str(), fit.trace);
  }

 private:
  State initial_state() const {
    State st;
    st.mu = x_.colwise().mean().transpose();
    const Matrix centered = x_.rowwise() - st.mu.transpose();
    const Matrix s = centered.transpose() * centered / n_;
    check_variances(s.diagonal());
    st.sigma2 = s.diagonal();
    switch (kind_) {
      case Null::Given:
      case Null::EquiFixed:
        st.sigma2 = variances_from(s, st.sigma2);
        break;
      case Null::Independence:
        break;
      case Null::EquiFree:
        st.rho = mean_off_diagonal(unit_diagonal_scale(s));
        check_rho(st.rho, p_);
        break;
    }
    return st;
  }

  Matrix null_corr(const State& st) const {
    switch (kind_) {
      case Null::Given:
        return r0_;
      case Null::EquiFixed:
        return equicorrelation(rho0_, p_);
      case Null::Independence:
        return Matrix::Identity(p_, p_);
      case Null::EquiFree:
        return equicorrelation(st.rho, p_);
    }
    return {};
  }

  Matrix null_corr_inverse(const State& st) const {
    switch (kind_) {
      case Null::Given:
      case Null::EquiFixed:
        return r0_inv_;
      case Null::Independence:
        return Matrix::Identity(p_, p_);
      case Null::EquiFree:
        return equicorr_inverse(st.rho, p_).matrix();
    }
    return {};
  }

  Matrix precision(const State& st) const {
    const Vector inv_sd = st.sigma2.cwiseSqrt().cwiseInverse();
    return inv_sd.asDiagonal() * null_corr_inverse(st) * inv_sd.asDiagonal();
  }

  Vector variances_from(const Matrix& s, const Vector& start) const {
    check_variances(s.diagonal());
    Vector tau = start.cwiseSqrt().cwiseInverse();
    if (kind_ == Null::Given) {
      solve_variance_system(r0_inv_.cwiseProduct(s), tau);
    } else {
      solve_equicorr_system(s, rho0_, tau);
    }
    return tau.cwiseAbs2().cwiseInverse();
  }

  State step(const State& st) const {
    const Vector w = kernels::dpd_weights(x_, st.mu, precision(st), beta_, cfg_.exec);
    const double kappa0 = w.sum() / n_ - kappa_constants(p_, beta_).xi_offset;
    if (!(kappa0 > 0.0)) {
      std::ostringstream os;
      os << "kappa0 = " << kappa0 << " <= 0 during the fit; beta = " << beta_
         << " down-weights essentially the whole sample";
      throw DegeneracyError(os.str());
    }
    State next;
    next.mu = kernels::weighted_mean(x_, w, cfg_.exec);
    const Matrix s = kernels::weighted_cross(x_, w, next.mu, cfg_.exec) / (n_ * kappa0);
    switch (kind_) {
      case Null::Given:
      case Null::EquiFixed:
        next.sigma2 = variances_from(s, st.sigma2);
        break;
      case Null::Independence:
        check_variances(s.diagonal());
        next.sigma2 = s.diagonal();
        break;
      case Null::EquiFree:
        check_variances(s.diagonal());
        next.sigma2 = s.diagonal();
        next.rho = mean_off_diagonal(unit_diagonal_scale(s));
        break;
    }
    return next;
  }

  void damp(const State& old, State& next) const {
    const double d = damping_;
    if (d == 1.0) return;
    next.mu = old.mu + d * (next.mu - old.mu);
    next.sigma2 = old.sigma2 + d * (next.sigma2 - old.sigma2);
    next.rho = old.rho + d * (next.rho - old.rho);
  }

  double change(const State& old, const State& next) const {
    double r = 0.0;
    for (int j = 0; j < p_; ++j) {
      r = std::max(r, std::abs(next.mu[j] - old.mu[j]) / std::sqrt(old.sigma2[j]));
      r = std::max(r, std::abs(next.sigma2[j] - old.sigma2[j]) / old.sigma2[j]);
    }
    if (kind_ == Null::EquiFree) {
      check_rho(next.rho, p_);
      r = std::max(r, std::abs(next.rho - old.rho));
    }
    return r;
  }

  // Re-evaluates weights, kappa0 and R_{X,beta} at the converged point.
  void finish(const State& st, RestrictedFit& fit) const {
    fit.mu_tilde = st.mu;
    fit.sigma2_tilde = st.sigma2;
    fit.null_corr = null_corr(st);
    if (kind_ == Null::EquiFree) fit.rho_tilde = st.rho;
    const WeightedScatter ws = weighted_scatter_with_precision(x_, st.mu, st.sigma2,
                                                               precision(st), beta_, cfg_.exec);
    fit.weights = ws.weights;
    fit.kappa0_tilde = ws.kappa0_tilde;
    fit.r_tilde = ws.r_matrix;
  }

  const Sample& x_;
  Null kind_;
  Matrix r0_;
  Matrix r0_inv_;
  double rho0_;
  double beta_;
  FitConfig cfg_;
  double damping_ = 1.0;
  int p_ = 0;
  double n_ = 0.0;
};

void check_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw DomainError("beta must be a finite nonnegative number");
}

}  // namespace

void FitConfig::validate() const {
  if (!(tolerance > 0.0)) throw DomainError("fit tolerance must be positive");
  if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0, 1]");
}

RestrictedFit fit_given_correlation(const Sample& x, const SymMatrix& r0, double beta,
                                    const FitConfig& cfg) {
  cfg.validate();
  check_beta(beta);
  validate_sample(x, "fit_given_correlation");
  if (r0.dim() != x.cols()) {
    std::ostringstream os;
    os << "R0 is " << r0.dim() << "x" << r0.dim() << " but the sample has " << x.cols()
       << " columns";
    throw StructuralError(os.str());
  }
  for (int j = 0; j < r0.dim(); ++j)
    if (std::abs(r0(j, j) - 1.0) > 1e-10)
      throw StructuralError("R0 must have a unit diagonal");
  return Solver(x, Null::Given, r0.matrix(), 0.0, beta, cfg).run();
}

RestrictedFit fit_equicorr_fixed(const Sample& x, double rho0, double beta,
                                 const FitConfig& cfg) {
  cfg.validate();
  check_beta(beta);
  validate_sample(x, "fit_equicorr_fixed");
  equicorr_inverse(rho0, static_cast<int>(x.cols()));  // domain check
  return Solver(x, Null::EquiFixed, Matrix(), rho0, beta, cfg).run();
}

RestrictedFit fit_independence(const Sample& x, double beta, const FitConfig& cfg) {
  cfg.validate();
  check_beta(beta);
  validate_sample(x, "fit_independence");
  return Solver(x, Null::Independence, Matrix(), 0.0, beta, cfg).run();
}

RestrictedFit fit_equicorr_free(const Sample& x, double beta, const FitConfig& cfg) {
  cfg.validate();
  check_beta(beta);
  validate_sample(x, "fit_equicorr_free");
  if (x.cols() < 2) throw StructuralError("free equicorrelation fit needs p >= 2");
  return Solver(x, Null::EquiFree, Matrix(), 0.0, beta, cfg).run();
}

Matrix pearson_correlation(const Sample& x) {
  validate_sample(x, "pearson_correlation");
  const Vector mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - mean.transpose();
  const Matrix s = centered.transpose() * centered / static_cast<double>(x.rows());
  check_variances(s.diagonal());
  return unit_diagonal_scale(s);
}

}  // namespace rao
