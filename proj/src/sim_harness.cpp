#include "rao/sim_harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rao/chi_square.hpp"
#include "rao/errors.hpp"

namespace rao {

namespace {

// Distinguishes the contamination indicator and chi-square streams from the
// normal stream of the same seed.
constexpr std::uint64_t kIndicatorStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kMixingStream = 0xd1b54a32d192ed03ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Matrix cholesky_lower(const GaussianParams& params) {
  const Eigen::LLT<Matrix> llt(params.sigma());
  if (llt.info() != Eigen::Success)
    throw FactorizationError("sampler covariance is not positive definite");
  return llt.matrixL();
}

void fill_normals(Matrix& z, std::mt19937_64& gen) {
  std::normal_distribution<double> norm;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = norm(gen);
}

// Outcome of one (replication, cell): statistic or failure kind.
struct Outcome {
  double statistic = 0.0;
  double p_value = 1.0;
  enum { Ok, Failed, NotConverged } status = Ok;
};

struct Cell {
  NullSpec null;
  double beta;
};

std::vector<Cell> cells_of(const ScenarioSpec& spec) {
  std::vector<Cell> cells;
  for (const NullSpec& t : spec.tests) {
    if (t.kind == TestKind::BartlettLrt) {
      cells.push_back({t, 0.0});
    } else {
      for (double b : spec.betas) cells.push_back({t, b});
    }
  }
  return cells;
}

}  // namespace

void Contamination::validate(int p) const {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw DomainError("contamination weight epsilon must lie in [0, 1)");
  switch (kind) {
    case ContaminantKind::LocationShift:
      if (shift.size() != p) throw StructuralError("contamination shift must have length p");
      break;
    case ContaminantKind::ScaleInflation:
      if (!(scale > 0.0)) throw DomainError("contamination scale must be positive");
      break;
    case ContaminantKind::PointMass:
      if (point.size() != p) throw StructuralError("contamination point must have length p");
      break;
  }
}

void ScenarioSpec::validate() const {
  if (replications < 1) throw DomainError("scenario needs at least one replication");
  if (n < 2) throw DomainError("scenario needs n >= 2");
  if (p < 1 || model.dim() != p) throw StructuralError("scenario model dimension must equal p");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (tests.empty()) throw DomainError("scenario lists no tests");
  if (betas.empty()) throw DomainError("scenario lists no beta values");
  for (double b : betas)
    if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("beta values must be nonnegative");
  if (generator == GeneratorKind::Contaminated) contamination.validate(p);
  if (generator == GeneratorKind::HeavyTailed && !(dof > 0.0))
    throw DomainError("heavy-tailed generator needs dof > 0");
  for (const NullSpec& t : tests) {
    if ((t.kind == TestKind::EquicorrFixed || t.kind == TestKind::Bivariate) && !t.rho0)
      throw DomainError(std::string(to_string(t.kind)) + " test needs rho0");
    if (t.kind == TestKind::SpecifiedR) {
      if (!t.r0) throw DomainError("specified-R test needs an R0 matrix");
      if (t.r0->rows() != p) {
        std::ostringstream os;
        os << "R0 is " << t.r0->rows() << "x" << t.r0->cols() << " but p = " << p;
        throw StructuralError(os.str());
      }
    }
  }
  fit.validate();
}

std::uint64_t replication_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(splitmix64(root) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

Sample sample_mvn(int n, const GaussianParams& params, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample size must be positive");
  const Matrix l = cholesky_lower(params);
  std::mt19937_64 gen(seed);
  Matrix z(n, params.dim());
  fill_normals(z, gen);
  Sample x = z * l.transpose();
  x.rowwise() += params.mu().transpose();
  return x;
}

Sample sample_contaminated(int n, const GaussianParams& clean, const Contamination& c,
                           std::uint64_t seed) {
  c.validate(clean.dim());
  Sample x = sample_mvn(n, clean, seed);
  if (c.epsilon == 0.0) return x;
  std::mt19937_64 ind(splitmix64(seed ^ kIndicatorStream));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double root_scale = std::sqrt(c.scale);
  for (int i = 0; i < n; ++i) {
    if (unif(ind) >= c.epsilon) continue;
    switch (c.kind) {
      case ContaminantKind::LocationShift:
        x.row(i) += c.shift.transpose();
        break;
      case ContaminantKind::ScaleInflation:
        x.row(i) = clean.mu().transpose() + root_scale * (x.row(i) - clean.mu().transpose());
        break;
      case ContaminantKind::PointMass:
        x.row(i) = c.point.transpose();
        break;
    }
  }
  return x;
}

Sample sample_heavy_tailed(int n, const GaussianParams& params, double dof,
                           std::uint64_t seed) {
  if (!(dof > 0.0)) throw DomainError("dof must be positive");
  Sample x = sample_mvn(n, params, seed);
  std::mt19937_64 gen(splitmix64(seed ^ kMixingStream));
  std::chi_squared_distribution<double> chi(dof);
  for (int i = 0; i < n; ++i) {
    const double f = 1.0 / std::sqrt(chi(gen) / dof);
    x.row(i) = params.mu().transpose() + f * (x.row(i) - params.mu().transpose());
  }
  return x;
}

Sample draw_replication(const ScenarioSpec& spec, int replication) {
  const std::uint64_t seed = replication_seed(spec.seed, static_cast<std::uint64_t>(replication));
  switch (spec.generator) {
    case GeneratorKind::Pure:
      return sample_mvn(spec.n, spec.model, seed);
    case GeneratorKind::Contaminated:
      return sample_contaminated(spec.n, spec.model, spec.contamination, seed);
    case GeneratorKind::HeavyTailed:
      return sample_heavy_tailed(spec.n, spec.model, spec.dof, seed);
  }
  throw StructuralError("unknown generator");
}

TestReport run_test(const Sample& x, const NullSpec& null, double beta, const FitConfig& cfg) {
  switch (null.kind) {
    case TestKind::SpecifiedR:
      if (!null.r0) throw DomainError("specified-R test needs an R0 matrix");
      return test_specified_correlation(x, SymMatrix(*null.r0), beta, cfg);
    case TestKind::EquicorrFixed:
      if (!null.rho0) throw DomainError("equicorr-fixed test needs rho0");
      return test_equicorr_fixed(x, *null.rho0, beta, cfg);
    case TestKind::Independence:
      return test_independence(x, beta, cfg);
    case TestKind::EquicorrFree:
      return test_equicorr_free(x, beta, cfg);
    case TestKind::Bivariate:
      if (!null.rho0) throw DomainError("bivariate test needs rho0");
      return test_bivariate_closed_form(x, *null.rho0, beta, cfg);
    case TestKind::BartlettLrt:
      return bartlett_lrt_independence(x);
  }
  throw StructuralError("unknown test kind");
}

MonteCarloSummary run_size_power(const ScenarioSpec& spec, int threads) {
  spec.validate();
  const std::vector<Cell> cells = cells_of(spec);
  const int reps = spec.replications;
  const std::size_t ncell = cells.size();
  std::vector<Outcome> outcomes(static_cast<std::size_t>(reps) * ncell);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (int r = 0; r < reps; ++r) {
    const Sample x = draw_replication(spec, r);
    for (std::size_t c = 0; c < ncell; ++c) {
      Outcome& o = outcomes[static_cast<std::size_t>(r) * ncell + c];
      try {
        const TestReport rep = run_test(x, cells[c].null, cells[c].beta, spec.fit);
        o.statistic = rep.statistic;
        o.p_value = rep.p_value;
      } catch (const ConvergenceError&) {
        o.status = Outcome::NotConverged;
      } catch (const Error&) {
        o.status = Outcome::Failed;
      }
    }
  }

  MonteCarloSummary s;
  s.n = spec.n;
  s.p = spec.p;
  s.replications = reps;
  s.alpha = spec.alpha;
  s.seed = spec.seed;
  for (std::size_t c = 0; c < ncell; ++c) {
    CellSummary cs;
    cs.kind = cells[c].null.kind;
    cs.beta = cells[c].beta;
    cs.df = vecl_size(spec.p);
    for (int r = 0; r < reps; ++r) {
      const Outcome& o = outcomes[static_cast<std::size_t>(r) * ncell + c];
      if (o.status == Outcome::Ok) {
        ++cs.valid;
        if (o.p_value < spec.alpha) ++cs.rejections;
        cs.statistics.push_back(o.statistic);
      } else {
        ++cs.failures;
        if (o.status == Outcome::NotConverged) ++cs.nonconvergence;
      }
    }
    if (cs.valid > 0) {
      const double v = cs.valid;
      cs.rejection_rate = cs.rejections / v;
      cs.std_error = std::sqrt(cs.rejection_rate * (1.0 - cs.rejection_rate) / v);
      double sum = 0.0;
      for (double t : cs.statistics) sum += t;
      cs.mean_statistic = sum / v;
      double ss = 0.0;
      for (double t : cs.statistics) ss += (t - cs.mean_statistic) * (t - cs.mean_statistic);
      cs.var_statistic = cs.valid > 1 ? ss / (v - 1.0) : 0.0;
      cs.ks_distance = cs.df > 0 ? ks_calibration(cs.statistics, cs.df) : 1.0;
    } else {
      cs.rejection_rate = std::nan("");
      cs.std_error = std::nan("");
      cs.mean_statistic = std::nan("");
      cs.var_statistic = std::nan("");
      cs.ks_distance = std::nan("");
    }
    s.cells.push_back(std::move(cs));
  }
  return s;
}

double ks_calibration(std::vector<double> statistics, int df) {
  if (statistics.empty()) throw DomainError("KS calibration needs at least one statistic");
  std::sort(statistics.begin(), statistics.end());
  const double n = static_cast<double>(statistics.size());
  double d = 0.0;
  for (std::size_t i = 0; i < statistics.size(); ++i) {
    const double f = chi_square_cdf(std::max(0.0, statistics[i]), df);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

}  // namespace rao
