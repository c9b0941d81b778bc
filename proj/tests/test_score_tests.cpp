#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rao/chi_square.hpp"
#include "rao/errors.hpp"
#include "rao/score_tests.hpp"
#include "support/oracles.hpp"

using namespace rao;

namespace {

Matrix sample(int n, const Matrix& r, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  std::normal_distribution<double> nd;
  Matrix x = oracle::normal_sample(n, r, rng);
  for (int j = 0; j < x.cols(); ++j) x.col(j) = x.col(j).array() * u(rng) + nd(rng);
  return x;
}

FitConfig tight() {
  FitConfig cfg;
  cfg.tolerance = 1e-13;
  return cfg;
}

constexpr double kBetas[] = {0.0, 0.1, 0.5, 1.0};

}  // namespace

TEST(Statistic, QuadraticFormMatchesTraceForm) {
  std::mt19937_64 rng(1);
  for (int p : {2, 3, 5}) {
    const Matrix r0 = oracle::random_corr(p, rng);
    const Matrix x = sample(150, oracle::random_corr(p, rng), 10 + p);
    for (double beta : kBetas) {
      const RestrictedFit fit = fit_given_correlation(x, SymMatrix(r0), beta, tight());
      const double t = statistic::trace_form(fit);
      EXPECT_LT(oracle::rel_diff(statistic::quadratic_form(x, fit), t), 1e-8) << p << " " << beta;
      EXPECT_LT(oracle::rel_diff(
                    statistic::quadratic_form(x, fit, statistic::ScoreRoute::Correlation), t),
                1e-8);
      EXPECT_LT(oracle::rel_diff(statistic::quadratic_form_eta(x, fit), t), 1e-7);
      EXPECT_LT(oracle::rel_diff(statistic::vecl_form(fit), t), 1e-8);
    }
  }
}

TEST(Statistic, PublicQuadraticFormEntryPoint) {
  const Matrix r0 = equicorrelation(0.2, 3);
  const Matrix x = sample(100, Matrix::Identity(3, 3), 2);
  const TestReport r = test_specified_correlation(x, SymMatrix(r0), 0.3, tight());
  EXPECT_LT(oracle::rel_diff(rao_statistic_quadratic_form(x, SymMatrix(r0), 0.3, tight()),
                             r.statistic),
            1e-8);
}

TEST(Statistic, TraceFormByDefinition) {
  std::mt19937_64 rng(3);
  const Matrix r0 = oracle::random_corr(4, rng);
  const Matrix x = sample(120, r0, 4);
  for (double beta : kBetas) {
    const RestrictedFit fit = fit_given_correlation(x, SymMatrix(r0), beta, tight());
    const Matrix m = r0.inverse() * fit.r_tilde - Matrix::Identity(4, 4);
    const KappaSet k = kappa_constants(4, beta);
    const double expected = fit.n() * fit.kappa0_tilde * fit.kappa0_tilde / k.kappa1 * (m * m).trace();
    EXPECT_LT(oracle::rel_diff(statistic::trace_form(fit), expected), 1e-10);
  }
}

TEST(Tests, BivariateMatchesSpecified) {
  const Matrix x = sample(90, (Matrix(2, 2) << 1, 0.4, 0.4, 1).finished(), 5);
  for (double rho0 : {-0.5, 0.0, 0.3, 0.8}) {
    for (double beta : kBetas) {
      const TestReport a = test_bivariate_closed_form(x, rho0, beta, tight());
      const TestReport b =
          test_specified_correlation(x, SymMatrix(equicorrelation(rho0, 2)), beta, tight());
      EXPECT_LT(oracle::rel_diff(a.statistic, b.statistic), 1e-8) << rho0 << " " << beta;
      EXPECT_EQ(a.df, 1);
    }
  }
}

TEST(Tests, BivariateClassicalFormula) {
  const Matrix x = sample(70, (Matrix(2, 2) << 1, -0.3, -0.3, 1).finished(), 6);
  const double r = oracle::pearson(x)(0, 1);
  const double rho0 = 0.25;
  const double expected = 70 * std::pow((r - rho0) / (1 - rho0 * r), 2);
  EXPECT_LT(oracle::rel_diff(test_bivariate_closed_form(x, rho0, 0.0, tight()).statistic, expected),
            1e-10);
}

TEST(Tests, EquicorrFixedMatchesSpecified) {
  for (int p : {3, 5}) {
    const Matrix x = sample(120, equicorrelation(0.3, p), 7 + p);
    for (double rho0 : {-0.1, 0.2, 0.6}) {
      for (double beta : kBetas) {
        const TestReport a = test_equicorr_fixed(x, rho0, beta, tight());
        const TestReport b =
            test_specified_correlation(x, SymMatrix(equicorrelation(rho0, p)), beta, tight());
        EXPECT_LT(oracle::rel_diff(a.statistic, b.statistic), 1e-8) << p << " " << rho0;
        ASSERT_TRUE(a.rho0);
        EXPECT_EQ(*a.rho0, rho0);
      }
    }
  }
}

TEST(Tests, IndependenceIsEquicorrAtZero) {
  const Matrix x = sample(100, equicorrelation(0.2, 4), 9);
  for (double beta : kBetas) {
    EXPECT_LT(oracle::rel_diff(test_independence(x, beta, tight()).statistic,
                               test_equicorr_fixed(x, 0.0, beta, tight()).statistic),
              1e-8);
    EXPECT_LT(oracle::rel_diff(test_independence(x, beta, tight()).statistic,
                               test_specified_correlation(x, SymMatrix::identity(4), beta, tight())
                                   .statistic),
              1e-8);
  }
}

TEST(Tests, IndependenceClassicalIsSumOfSquaredCorrelations) {
  const Matrix x = sample(60, equicorrelation(0.1, 5), 10);
  const TestReport r = test_independence(x, 0.0);
  EXPECT_LT(oracle::rel_diff(r.statistic, 60 * oracle::sum_sq_off_diagonal(oracle::pearson(x))),
            1e-10);
  EXPECT_EQ(r.df, 10);
  EXPECT_NEAR(r.p_value, chi_square_sf(r.statistic, 10), 1e-15);
}

TEST(Tests, EquicorrFreeByHand) {
  const int p = 3;
  const Matrix x = sample(80, equicorrelation(0.4, p), 11);
  for (double beta : kBetas) {
    const RestrictedFit fit = fit_equicorr_free(x, beta, tight());
    // Independent evaluation from the fitted quantities.
    const GaussianParams g(fit.mu_tilde, fit.sigma2_tilde, equicorrelation(*fit.rho_tilde, p));
    double wsum = 0.0;
    Matrix cross = Matrix::Zero(p, p);
    for (int i = 0; i < x.rows(); ++i) {
      const Vector d = x.row(i).transpose() - fit.mu_tilde;
      const double w = std::exp(-0.5 * beta * d.dot(g.sigma().inverse() * d));
      wsum += w;
      cross += w * d * d.transpose();
    }
    const double k0 = wsum / x.rows() - beta * std::pow(1 + beta, -(p / 2.0 + 1));
    const Vector sd = fit.sigma2_tilde.cwiseSqrt();
    const Matrix r = sd.cwiseInverse().asDiagonal() * (cross / (x.rows() * k0)) *
                     sd.cwiseInverse().asDiagonal();
    const double rho = (r(1, 0) + r(2, 0) + r(2, 1)) / 3.0;
    EXPECT_NEAR(rho, *fit.rho_tilde, 1e-10);
    const double k1 = 2 * std::pow(2 * beta + 1, -p / 2.0 - 2);
    double ss = 0.0;
    for (auto [i, j] : {std::pair{1, 0}, {2, 0}, {2, 1}}) ss += std::pow(r(i, j) - rho, 2);
    const double expected = 2 * x.rows() * k0 * k0 / k1 * ss / std::pow(1 - rho, 2);
    const TestReport rep = test_equicorr_free(x, beta, tight());
    EXPECT_LT(oracle::rel_diff(rep.statistic, expected), 1e-8) << beta;
    EXPECT_LT(oracle::rel_diff(rep.statistic, statistic::equicorr_fixed_form(fit, *fit.rho_tilde)),
              1e-8);
    EXPECT_EQ(rep.df, 3);
  }
}

TEST(Tests, EquicorrFreeNeedsThreeColumns) {
  const Matrix x = sample(40, Matrix::Identity(2, 2), 12);
  EXPECT_THROW(test_equicorr_free(x, 0.0), DegeneracyError);
}

TEST(Tests, BartlettBivariateFormula) {
  const Matrix x = sample(50, (Matrix(2, 2) << 1, 0.5, 0.5, 1).finished(), 13);
  const double r = oracle::pearson(x)(0, 1);
  const double expected = -(50 - 1 - 9.0 / 6.0) * std::log(1 - r * r);
  const TestReport rep = bartlett_lrt_independence(x);
  EXPECT_LT(oracle::rel_diff(rep.statistic, expected), 1e-12);
  EXPECT_EQ(rep.df, 1);
  EXPECT_FALSE(rep.fit);
}

TEST(Tests, BartlettGeneralDeterminant) {
  const Matrix x = sample(40, equicorrelation(0.3, 4), 14);
  const double expected = -(40 - 1 - 13.0 / 6.0) * std::log(oracle::pearson(x).determinant());
  EXPECT_LT(oracle::rel_diff(bartlett_lrt_independence(x).statistic, expected), 1e-12);
}

TEST(Tests, BartlettVanishesAtIdentity) {
  std::mt19937_64 rng(15);
  const Matrix x = oracle::sample_with_correlation(30, Matrix::Identity(3, 3), rng);
  EXPECT_NEAR(bartlett_lrt_independence(x).statistic, 0.0, 1e-12);
}

TEST(Tests, BartlettRankDeficient) {
  const Matrix x = sample(10, Matrix::Identity(12, 12), 16);
  try {
    bartlett_lrt_independence(x);
    FAIL() << "expected RankError";
  } catch (const RankError& e) {
    EXPECT_NE(std::string(e.what()).find(
                  "lack of positive definiteness makes the determinant to be null"),
              std::string::npos);
  }
  // The score statistic is still defined.
  for (double beta : {0.0, 0.1}) EXPECT_GE(test_independence(x, beta).statistic, 0.0);
}

TEST(Tests, AffineInvariance) {
  std::mt19937_64 rng(17);
  const Matrix r0 = oracle::random_corr(4, rng);
  const Matrix x = sample(100, equicorrelation(0.3, 4), 18);
  Vector scale(4), shift(4);
  scale << 0.01, 7.0, 1.0, 250.0;
  shift << -3.0, 1e3, 0.5, -40.0;
  const Matrix y = (x * scale.asDiagonal()).rowwise() + shift.transpose();
  for (double beta : kBetas) {
    EXPECT_LT(oracle::rel_diff(test_specified_correlation(x, SymMatrix(r0), beta, tight()).statistic,
                               test_specified_correlation(y, SymMatrix(r0), beta, tight()).statistic),
              1e-10);
    EXPECT_LT(oracle::rel_diff(test_equicorr_fixed(x, 0.4, beta, tight()).statistic,
                               test_equicorr_fixed(y, 0.4, beta, tight()).statistic),
              1e-10);
    EXPECT_LT(oracle::rel_diff(test_independence(x, beta, tight()).statistic,
                               test_independence(y, beta, tight()).statistic),
              1e-10);
    EXPECT_LT(oracle::rel_diff(test_equicorr_free(x, beta, tight()).statistic,
                               test_equicorr_free(y, beta, tight()).statistic),
              1e-10);
  }
}

TEST(Tests, StatisticsNonnegative) {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 30; ++rep) {
    const int p = 2 + rep % 4;
    const Matrix r0 = oracle::random_corr(p, rng);
    const Matrix x = sample(15 + rep, oracle::random_corr(p, rng), 100 + rep);
    for (double beta : {0.0, 0.5}) {
      EXPECT_GE(test_specified_correlation(x, SymMatrix(r0), beta).statistic, 0.0);
      EXPECT_GE(test_independence(x, beta).statistic, 0.0);
      EXPECT_GE(test_equicorr_fixed(x, 0.2, beta).statistic, 0.0);
      if (p >= 3) {
        EXPECT_GE(test_equicorr_free(x, beta).statistic, 0.0);
      }
    }
  }
}

TEST(Tests, KindNames) {
  for (TestKind k : {TestKind::SpecifiedR, TestKind::EquicorrFixed, TestKind::Independence,
                     TestKind::EquicorrFree, TestKind::Bivariate, TestKind::BartlettLrt})
    EXPECT_EQ(test_kind_from_string(to_string(k)), k);
  EXPECT_EQ(test_kind_from_string("specified"), TestKind::SpecifiedR);
  EXPECT_EQ(test_kind_from_string("bartlett"), TestKind::BartlettLrt);
  EXPECT_THROW(test_kind_from_string("sphericity"), DomainError);
}

TEST(Tests, ArgumentChecks) {
  const Matrix x3 = sample(30, Matrix::Identity(3, 3), 20);
  EXPECT_THROW(test_bivariate_closed_form(x3, 0.1, 0.0), DomainError);
  const Matrix x2 = sample(30, Matrix::Identity(2, 2), 21);
  EXPECT_THROW(test_bivariate_closed_form(x2, 1.0, 0.0), DomainError);
  EXPECT_THROW(test_independence(sample(30, Matrix::Identity(1, 1), 22), 0.0), DomainError);
}

TEST(Tests, CollapseIsReportedAsDegeneracy) {
  // With n < (1+beta)^{p/2+1}/beta the DPD objective is unbounded below at
  // a point mass, and the fixed point runs into it.
  const Matrix x = sample(20, Matrix::Identity(30, 30), 23);
  EXPECT_THROW(test_independence(x, 0.5), DegeneracyError);
}
