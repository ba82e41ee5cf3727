#include "ouint/stationary.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ouint/stability.hpp"
#include "test_util.hpp"

namespace ouint {
namespace {

using testing::max_abs_diff;
using testing::random_matrix;
using testing::random_upper_triangular;
using testing::random_vector;
using testing::triangular_model;

double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).max_abs() / std::max(want.max_abs(), 1e-300);
}

OuModel random_stable_model(RngStream& rng, std::size_t p) {
  for (;;) {
    const Matrix b = random_matrix(rng, p, p, -2, 2);
    if (!is_stable(b).stable) continue;
    Matrix sigma = random_matrix(rng, p, p, -1, 1);
    for (std::size_t i = 0; i < p; ++i) sigma(i, i) += 2.0;
    return OuModel(Vector(p), random_vector(rng, p, -2, 2), b, sigma);
  }
}

TEST(ControllabilityRank, Examples) {
  RngStream rng(41, 0);
  EXPECT_EQ(controllability_rank(random_matrix(rng, 4, 4, -1, 1), Matrix::identity(4)), 4u);
  EXPECT_EQ(controllability_rank(Matrix::identity(2), Matrix::from_rows({{1}, {0}})), 1u);
  EXPECT_EQ(controllability_rank(Matrix::from_rows({{0, 1}, {0, 0}}),
                                 Matrix::from_rows({{0}, {1}})),
            2u);
}

TEST(StationaryExists, Verdicts) {
  const Matrix b4 = Matrix::from_rows({{-1, 0.5, 0.3}, {0, -2, 0.7}, {0, 0, -1.5}});
  const auto s4 = stationary_exists(triangular_model(b4, Vector{1, 2, 3}));
  EXPECT_EQ(s4.verdict, Verdict::kExists);
  EXPECT_TRUE(s4.b_stable);
  EXPECT_EQ(s4.controllability_rank, 3u);

  const OuModel counter(Vector(2), Vector(2), Matrix::from_rows({{1, 7}, {-1, -3}}),
                        Matrix::identity(2));
  EXPECT_EQ(stationary_exists(counter).verdict, Verdict::kExists);
  const OuModel reduced = intervene_ou(counter, {2, 0.0}).model;
  EXPECT_EQ(reduced.speed(), Matrix::from_rows({{1}}));
  const auto rv = stationary_exists(reduced);
  EXPECT_TRUE(rv.sigma_full_column_span);
  EXPECT_EQ(rv.verdict, Verdict::kNotExists);

  const OuModel thin(Vector(2), Vector(2), Matrix::identity(2) * -1.0,
                     Matrix::from_rows({{1}, {0}}));
  const auto tv = stationary_exists(thin);
  EXPECT_EQ(tv.verdict, Verdict::kIndeterminateColumnSpan);
  EXPECT_FALSE(tv.sigma_full_column_span);
  EXPECT_EQ(tv.controllability_rank, 1u);
}

TEST(StationaryDistribution, Examples) {
  for (std::size_t p = 1; p <= 4; ++p) {
    Vector level(p);
    for (std::size_t i = 0; i < p; ++i) level[i] = static_cast<double>(i) - 1.5;
    const OuModel m(Vector(p), level, Matrix::identity(p) * -1.0, Matrix::identity(p));
    const GaussianLaw law = stationary_distribution(m);
    EXPECT_EQ(law.mean, level);
    EXPECT_LE(max_abs_diff(law.cov, Matrix::identity(p) * 0.5), 1e-15);
  }

  const double b = -0.7, s = 1.3;
  const OuModel scalar(Vector{0}, Vector{2}, Matrix::from_rows({{b}}), Matrix::from_rows({{s}}));
  EXPECT_NEAR(stationary_distribution(scalar).cov(0, 0), -s * s / (2 * b), 1e-14);
}

TEST(StationaryDistribution, TwoByTwoUpperTriangularClosedForm) {
  RngStream rng(43, 0);
  for (int k = 0; k < 200; ++k) {
    const double u = rng.uniform(-3, -0.1), w = rng.uniform(-3, -0.1), v = rng.uniform(-2, 2);
    const OuModel m(Vector(2), Vector(2), Matrix::from_rows({{u, v}, {0, w}}),
                    Matrix::identity(2));
    const Matrix want = Matrix::from_rows(
        {{-1 / (2 * u) - v * v / (2 * u * w * (u + w)), v / (2 * w * (u + w))},
         {v / (2 * w * (u + w)), -1 / (2 * w)}});
    ASSERT_LE(rel_err(stationary_distribution(m).cov, want), 1e-12);
  }
}

TEST(StationaryDistribution, ResidualAndPositiveDefinite) {
  RngStream rng(47, 0);
  for (int k = 0; k < 200; ++k) {
    const OuModel m = random_stable_model(rng, 1 + k % 6);
    const Matrix ss = m.sigma() * m.sigma().transpose();
    const Matrix g = stationary_distribution(m).cov;
    const Matrix& b = m.speed();
    ASSERT_LE((ss + b * g + g * b.transpose()).norm_inf(), 1e-9 * ss.norm_inf());
    ASSERT_EQ(g, g.transpose());
    ASSERT_TRUE(try_cholesky(g).has_value());
  }
}

TEST(StationaryDistribution, RejectsWhenNoLaw) {
  const OuModel unstable(Vector(1), Vector(1), Matrix::from_rows({{1}}), Matrix::identity(1));
  const OuModel thin(Vector(2), Vector(2), Matrix::identity(2) * -1.0,
                     Matrix::from_rows({{1}, {0}}));
  for (const OuModel* m : {&unstable, &thin}) {
    try {
      stationary_distribution(*m);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNoStationaryDistribution);
    }
  }
  EXPECT_THROW(gamma_by_quadrature(unstable, 10, 100), Error);
}

TEST(GammaByQuadrature, MinusIdentity) {
  const OuModel m(Vector(2), Vector(2), Matrix::identity(2) * -1.0, Matrix::identity(2));
  const Matrix half = Matrix::identity(2) * 0.5;
  // 400 panels: Simpson error on e^{-2s} over [0, 40] is about h⁴/180 · 2⁴ / 2 ≈ 2.8e-7.
  EXPECT_LE(max_abs_diff(gamma_by_quadrature(m, 40, 400), half), 3.5e-7);
  EXPECT_LE(max_abs_diff(gamma_by_quadrature(m, 40, 4000), half), 1e-8);
  EXPECT_LE(max_abs_diff(gamma_by_quadrature(m), half), 1e-9);
}

TEST(GammaByQuadrature, Preconditions) {
  const OuModel m(Vector(1), Vector(1), Matrix::from_rows({{-1}}), Matrix::identity(1));
  EXPECT_THROW(gamma_by_quadrature(m, 0.0, 100), Error);
  EXPECT_THROW(gamma_by_quadrature(m, 1.0, 1), Error);
}

TEST(GammaByQuadrature, AgreesWithLyapunovWhenStepResolvesB) {
  RngStream rng(53, 0);
  int checked = 0;
  while (checked < 100) {
    const OuModel m = random_stable_model(rng, 3);
    const double t = 40.0 / std::abs(spectral_abscissa(m.speed()));
    // 2000 panels are 4000 Simpson steps.
    if (t / 4000.0 * m.speed().norm_inf() > 0.05) continue;
    ++checked;
    const Matrix lyap = stationary_distribution(m).cov;
    ASSERT_LE(max_abs_diff(gamma_by_quadrature(m, t, 2000), lyap), 1e-6 * lyap.norm_inf());
  }
}

TEST(GammaByQuadrature, FourthOrderInPanels) {
  RngStream rng(57, 0);
  for (int k = 0; k < 20; ++k) {
    const OuModel m = random_stable_model(rng, 3);
    const Matrix lyap = stationary_distribution(m).cov;
    const double t = 40.0 / std::abs(spectral_abscissa(m.speed()));
    const std::size_t n = static_cast<std::size_t>(std::ceil(t * m.speed().norm_inf() / 2.0));
    const double coarse = max_abs_diff(gamma_by_quadrature(m, t, n), lyap);
    const double fine = max_abs_diff(gamma_by_quadrature(m, t, 2 * n), lyap);
    // Halving h cuts the error by about 16.
    ASSERT_GT(coarse / fine, 10.0) << k;
    ASSERT_LT(coarse / fine, 20.0) << k;
  }
}

TEST(GammaByQuadrature, TruncationShrinksWithHorizon) {
  RngStream rng(59, 0);
  for (int k = 0; k < 20; ++k) {
    const OuModel m = random_stable_model(rng, 3);
    const Matrix lyap = stationary_distribution(m).cov;
    const double scale = 1.0 / std::abs(spectral_abscissa(m.speed()));
    double prev = INFINITY;
    for (double t : {1.0, 2.0, 4.0, 8.0}) {
      const double err = max_abs_diff(gamma_by_quadrature(m, t * scale, 2000), lyap);
      ASSERT_LT(err, prev) << k << " T=" << t;
      prev = err;
    }
  }
}

GaussianLaw pipeline(const Matrix& b, const Vector& a, double c, ClosedFormTarget which) {
  const std::size_t m = which == ClosedFormTarget::kX2 ? 2 : 3;
  return stationary_distribution(intervene_ou(triangular_model(b, a), {m, c}).model);
}

TEST(TriangularClosedForms, MeanIgnoresInterventionWithoutCoupling) {
  Matrix b = Matrix::from_rows({{-1, 0, 0.3}, {0, -2, 0.7}, {0, 0, -1.5}});
  const Vector a{1, 2, 3};
  const GaussianLaw law = triangular_closed_forms(b, a, 17.0, ClosedFormTarget::kX2);
  EXPECT_EQ(law.mean, (Vector{1, 3}));
}

TEST(TriangularClosedForms, CoincidentDiagonal) {
  const double bb = -0.8, f = 1.7;
  const Matrix b = Matrix::from_rows({{bb, 0.4, f}, {0, -2, 0.2}, {0, 0, bb}});
  const GaussianLaw law = triangular_closed_forms(b, Vector{0, 0, 0}, 1.0, ClosedFormTarget::kX2);
  const Matrix want = Matrix::from_rows(
      {{-1 / (2 * bb) - f * f / (4 * bb * bb * bb), f / (4 * bb * bb)},
       {f / (4 * bb * bb), -1 / (2 * bb)}});
  EXPECT_LE(rel_err(law.cov, want), 1e-14);
  EXPECT_LE(rel_err(pipeline(b, Vector{0, 0, 0}, 1.0, ClosedFormTarget::kX2).cov, want), 1e-12);
}

TEST(TriangularClosedForms, PipelineMatchesClosedForms) {
  RngStream rng(61, 0);
  for (int k = 0; k < 1000; ++k) {
    Matrix b = random_upper_triangular(rng, -3, -0.1);
    if (k % 5 == 0) b(2, 2) = b(0, 0);
    if (k % 7 == 0) b(1, 1) = b(0, 0);
    const Vector a = random_vector(rng, 3, -5, 5);
    const double c = rng.uniform(-5, 5);
    for (auto which : {ClosedFormTarget::kX2, ClosedFormTarget::kX3}) {
      const GaussianLaw want = triangular_closed_forms(b, a, c, which);
      const GaussianLaw got = pipeline(b, a, c, which);
      ASSERT_LE(max_abs_diff(got.mean, want.mean), 1e-10 * std::max(1.0, want.mean.norm_inf()));
      ASSERT_LE(max_abs_diff(got.cov, want.cov), 1e-10 * want.cov.max_abs()) << k;
    }
  }
}

TEST(TriangularClosedForms, CovarianceIgnoresValueAndMeanIsAffine) {
  RngStream rng(67, 0);
  for (int k = 0; k < 100; ++k) {
    const Matrix b = random_upper_triangular(rng, -3, -0.1);
    const Vector a = random_vector(rng, 3, -5, 5);
    for (auto which : {ClosedFormTarget::kX2, ClosedFormTarget::kX3}) {
      const GaussianLaw g0 = pipeline(b, a, 0.0, which);
      const GaussianLaw g1 = pipeline(b, a, 1.0, which);
      const GaussianLaw g100 = pipeline(b, a, 100.0, which);
      ASSERT_LE(max_abs_diff(g0.cov, g100.cov), 1e-12);
      const double c = rng.uniform(-10, 10);
      const Vector slope = g1.mean - g0.mean;
      const Vector lhs = pipeline(b, a, c, which).mean - g0.mean;
      ASSERT_LE(max_abs_diff(lhs, slope * c), 1e-10 * (1 + std::abs(c)));
    }
    // X3 keeps its level under X2 := c.
    ASSERT_EQ(triangular_closed_forms(b, a, rng.uniform(-9, 9), ClosedFormTarget::kX2).mean[1], a[2]);
    ASSERT_EQ(pipeline(b, a, 42.0, ClosedFormTarget::kX2).mean[1], a[2]);
  }
}

TEST(TriangularClosedForms, Preconditions) {
  const Vector a{0, 0, 0};
  auto code = [&](const Matrix& b) {
    try {
      triangular_closed_forms(b, a, 0.0, ClosedFormTarget::kX2);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code(Matrix::identity(2) * -1.0), ErrorCode::kPreconditionViolated);
  EXPECT_EQ(code(Matrix::from_rows({{-1, 0, 0}, {1, -1, 0}, {0, 0, -1}})),
            ErrorCode::kPreconditionViolated);
  EXPECT_EQ(code(Matrix::from_rows({{-1, 0, 0}, {0, 0, 0}, {0, 0, -1}})),
            ErrorCode::kPreconditionViolated);
}

}  // namespace
}  // namespace ouint
