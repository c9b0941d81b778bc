#pragma once

// Monte-Carlo size/power engine.
//
// Replication r draws its sample from a generator seeded with
// replication_seed(root, r), so every replication is a pure function of
// (scenario, r). Replications run in parallel; the summary is folded in
// replication order, which makes it identical for any thread count.

#include <cstdint>
#include <optional>
#include <vector>

#include "rao/score_tests.hpp"

namespace rao {

enum class GeneratorKind { Pure, Contaminated, HeavyTailed };
enum class ContaminantKind { LocationShift, ScaleInflation, PointMass };

struct Contamination {
  double epsilon = 0.0;
  ContaminantKind kind = ContaminantKind::PointMass;
  Vector shift;        // location shift added to the clean mean
  double scale = 1.0;  // covariance inflation factor
  Vector point;        // point-mass location

  void validate(int p) const;
};

struct NullSpec {
  TestKind kind = TestKind::Independence;
  std::optional<double> rho0;  // equicorr-fixed, bivariate
  std::optional<Matrix> r0;    // specified-R
};

struct ScenarioSpec {
  int n = 0;
  int p = 0;
  GaussianParams model = GaussianParams::standard(1);
  GeneratorKind generator = GeneratorKind::Pure;
  Contamination contamination;
  double dof = 5.0;  // heavy-tailed generator (multivariate t)
  std::vector<NullSpec> tests;
  std::vector<double> betas{0.0};
  int replications = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  FitConfig fit;

  void validate() const;
};

struct CellSummary {
  TestKind kind = TestKind::Independence;
  double beta = 0.0;
  int df = 0;
  int valid = 0;
  int failures = 0;        // replications whose test threw
  int nonconvergence = 0;  // subset of failures: ConvergenceError
  int rejections = 0;
  double rejection_rate = 0.0;
  double std_error = 0.0;
  double mean_statistic = 0.0;
  double var_statistic = 0.0;
  double ks_distance = 0.0;
  std::vector<double> statistics;  // valid statistics in replication order
};

struct MonteCarloSummary {
  int n = 0;
  int p = 0;
  int replications = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<CellSummary> cells;
};

// splitmix64 of (root, stream): the seed of replication stream `stream`.
std::uint64_t replication_seed(std::uint64_t root, std::uint64_t stream);

Sample sample_mvn(int n, const GaussianParams& params, std::uint64_t seed);

// Row i comes from the contaminant with probability epsilon. Uses the same
// normal stream as sample_mvn, so epsilon = 0 reproduces it exactly.
Sample sample_contaminated(int n, const GaussianParams& clean, const Contamination& c,
                           std::uint64_t seed);

// Multivariate t with `dof` degrees of freedom: mu + L z / sqrt(g / dof).
Sample sample_heavy_tailed(int n, const GaussianParams& params, double dof,
                           std::uint64_t seed);

Sample draw_replication(const ScenarioSpec& spec, int replication);

// Runs one configured test.
TestReport run_test(const Sample& x, const NullSpec& null, double beta, const FitConfig& cfg);

// threads <= 0 uses the OpenMP default.
MonteCarloSummary run_size_power(const ScenarioSpec& spec, int threads = 0);

// sup_x |F_n(x) - F_{chi^2_df}(x)|.
double ks_calibration(std::vector<double> statistics, int df);

// Approximate 1% critical value 1.63 / sqrt(N) of the one-sample KS test.
double ks_critical_1pct(std::size_t n);

}  // namespace rao
