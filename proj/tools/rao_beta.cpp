// rao-beta: Rao beta-score tests on correlation matrices.
//
//   rao-beta test --kind independence --beta 0,0.5 data.csv
//   rao-beta test --kind specified --r0 R0.csv --format csv data.csv
//   rao-beta simulate scenario.txt --seed 7
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rao/errors.hpp"
#include "rao/io/csv.hpp"
#include "rao/io/report_io.hpp"
#include "rao/io/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct TestArgs {
  std::vector<std::string> kinds{"independence"};
  std::vector<double> betas{0.0};
  std::string r0_path;
  std::optional<double> rho0;
  std::string format = "json";
  double tolerance = 1e-10;
  int max_iterations = 500;
  double damping = 1.0;
  std::string data_path;
};

struct SimArgs {
  std::string scenario_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const rao::NumericalError*>(&e)) return kExitNumerical;
  return kExitData;
}

// RAO_THREADS caps the worker count; --threads can only lower it further.
int thread_budget(int requested) {
  int limit = omp_get_max_threads();
  if (const char* env = std::getenv("RAO_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) limit = std::min(limit, cap);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring invalid RAO_THREADS='" << env << "'\n";
    }
  }
  if (requested >= 1) limit = std::min(limit, requested);
  return std::max(1, limit);
}

int run_test_command(const TestArgs& a) {
  std::vector<rao::TestKind> kinds;
  for (const std::string& k : a.kinds) {
    try {
      kinds.push_back(rao::test_kind_from_string(k));
    } catch (const rao::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  for (double b : a.betas) {
    if (!(b >= 0.0)) {
      std::cerr << "error: beta values must be nonnegative\n";
      return kExitUsage;
    }
  }
  for (rao::TestKind k : kinds) {
    if (k == rao::TestKind::SpecifiedR && a.r0_path.empty()) {
      std::cerr << "error: --kind specified requires --r0 <file>\n";
      return kExitUsage;
    }
    if ((k == rao::TestKind::EquicorrFixed || k == rao::TestKind::Bivariate) && !a.rho0) {
      std::cerr << "error: --kind " << rao::to_string(k) << " requires --rho0 <value>\n";
      return kExitUsage;
    }
  }

  rao::FitConfig cfg;
  cfg.tolerance = a.tolerance;
  cfg.max_iterations = a.max_iterations;
  cfg.damping = a.damping;
  rao::NullSpec null;
  rao::Matrix x;
  try {
    cfg.validate();
    x = rao::io::read_csv(a.data_path).data;
    if (x.rows() < 2 || x.cols() < 2) {
      std::cerr << "error: " << a.data_path << ": tests need n >= 2 rows and p >= 2 columns (got n = "
                << x.rows() << ", p = " << x.cols() << ")\n";
      return kExitData;
    }
    if (!a.r0_path.empty())
      null.r0 = rao::io::read_correlation_csv(a.r0_path, static_cast<int>(x.cols())).matrix();
    null.rho0 = a.rho0;
  } catch (const rao::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }

  for (rao::TestKind k : kinds) {
    if (k == rao::TestKind::BartlettLrt && x.rows() <= x.cols())
      std::cerr << "warning: n = " << x.rows() << " <= p = " << x.cols()
                << ": the Bartlett statistic is undefined (singular correlation matrix)\n";
  }

  std::vector<rao::io::TestOutcome> outcomes;
  int status = kExitOk;
  for (rao::TestKind k : kinds) {
    null.kind = k;
    const std::vector<double> betas =
        k == rao::TestKind::BartlettLrt ? std::vector<double>{0.0} : a.betas;
    for (double b : betas) {
      rao::io::TestOutcome o;
      o.kind = k;
      o.beta = b;
      try {
        o.report = rao::run_test(x, null, b, cfg);
      } catch (const rao::Error& e) {
        o.error_class = rao::io::error_class(e);
        o.error = e.what();
        std::cerr << "error: " << rao::to_string(k) << " (beta = " << b << "): " << e.what()
                  << "\n";
        status = std::max(status, exit_code_for(e));
      }
      outcomes.push_back(std::move(o));
    }
  }
  std::cout << (a.format == "csv" ? rao::io::reports_to_csv(outcomes)
                                  : rao::io::reports_to_json(outcomes));
  return status;
}

int run_simulate_command(const SimArgs& a) {
  try {
    rao::ScenarioSpec spec = rao::io::read_scenario(a.scenario_path);
    if (a.seed) spec.seed = *a.seed;
    const rao::MonteCarloSummary s = rao::run_size_power(spec, thread_budget(a.threads));
    std::cout << (a.format == "csv" ? rao::io::summary_to_csv(s) : rao::io::summary_to_json(s));
    int failures = 0;
    for (const rao::CellSummary& c : s.cells) failures += c.failures;
    if (failures > 0)
      std::cerr << "note: " << failures << " test evaluations failed (see failures/nonconvergence)\n";
    return kExitOk;
  } catch (const rao::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rao beta-score tests for correlation matrices of multivariate normal data"};
  app.require_subcommand(1);

  TestArgs targs;
  CLI::App* test = app.add_subcommand("test", "Run score tests on a CSV data file");
  test->add_option("--kind", targs.kinds,
                   "Tests: independence, specified, equicorr-fixed, equicorr-free, bivariate, "
                   "bartlett")
      ->delimiter(',');
  test->add_option("--beta", targs.betas, "DPD tuning parameters (comma-separated, >= 0)")
      ->delimiter(',');
  test->add_option("--r0", targs.r0_path, "CSV file with the null correlation matrix");
  test->add_option("--rho0", targs.rho0, "Null equicorrelation / bivariate correlation");
  test->add_option("--format", targs.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  test->add_option("--tol", targs.tolerance, "Fixed-point tolerance")
      ->check(CLI::PositiveNumber);
  test->add_option("--max-iter", targs.max_iterations, "Maximum fixed-point iterations")
      ->check(CLI::PositiveNumber);
  test->add_option("--damping", targs.damping, "Fixed-point damping in (0, 1]");
  test->add_option("data", targs.data_path, "CSV data (rows = observations)")->required();

  SimArgs sargs;
  CLI::App* sim = app.add_subcommand("simulate", "Run a Monte-Carlo size/power scenario");
  sim->add_option("scenario", sargs.scenario_path, "Scenario file (key = value)")->required();
  sim->add_option("--format", sargs.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sim->add_option("--seed", sargs.seed, "Override the scenario seed");
  sim->add_option("--threads", sargs.threads, "Worker threads (capped by RAO_THREADS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (test->parsed()) return run_test_command(targs);
  return run_simulate_command(sargs);
}
