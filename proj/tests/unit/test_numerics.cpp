#include <doctest.h>

#include "oracles.hpp"

#include "mer/numerics/ols.hpp"
#include "mer/numerics/pca.hpp"
#include "mer/numerics/special.hpp"
#include "mer/numerics/standardize.hpp"
#include "mer/util/random.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>

using namespace mer;
using namespace mer::numerics;

namespace {

Matrix random_matrix(Rng& rng, Index n, Index d) {
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

oracle::Dense to_rows(const Matrix& m) {
  oracle::Dense rows(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
  return rows;
}

}  // namespace

TEST_CASE("incomplete beta agrees with Boost.Math") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 150.0}) {
    for (double b : {0.5, 1.0, 3.0, 40.0}) {
      for (double x : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) {
        const double ref = boost::math::ibeta(a, b, x);
        CHECK(regularized_incomplete_beta(a, b, x) == doctest::Approx(ref).epsilon(1e-11));
      }
    }
  }
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), InvalidArgument);
}

TEST_CASE("student t tail probabilities agree with Boost.Math to 1e-10") {
  for (double df : {1.0, 2.0, 5.0, 17.0, 46.0, 300.0, 7000.0}) {
    boost::math::students_t dist(df);
    for (double t : {0.0, 0.01, 0.5, 1.0, 1.96, 3.0, 8.0, 25.0}) {
      const double ref = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
      CHECK(std::fabs(student_t_two_sided_p(t, df) - ref) < 1e-10);
      CHECK(student_t_two_sided_p(-t, df) == student_t_two_sided_p(t, df));
      CHECK(std::fabs(student_t_cdf(-t, df) - boost::math::cdf(dist, -t)) < 1e-10);
    }
  }
  CHECK(student_t_two_sided_p(0.0, 10.0) == doctest::Approx(1.0));
  CHECK(student_t_two_sided_p(INFINITY, 10.0) == 0.0);
}

TEST_CASE("standardizer z-scores with population spread") {
  Matrix x(3, 2);
  x << 1, 4, 2, 4, 3, 4;
  const auto s = Standardizer::fit(x);
  const Matrix z = s.apply(x);
  CHECK(z(0, 0) == doctest::Approx(-1.2247).epsilon(1e-4));
  CHECK(z(1, 0) == doctest::Approx(0.0));
  CHECK(z(2, 0) == doctest::Approx(1.2247).epsilon(1e-4));
  CHECK(s.constant[1]);
  CHECK_FALSE(s.constant[0]);
  CHECK(z(0, 1) == 4.0);
  CHECK(z(2, 1) == 4.0);

  Rng rng(3);
  const Matrix r = random_matrix(rng, 40, 5) * 3.0;
  const Matrix zr = Standardizer::fit(r).apply(r);
  for (Index j = 0; j < zr.cols(); ++j) {
    CHECK(std::fabs(zr.col(j).mean()) < 1e-10);
    CHECK(std::sqrt(zr.col(j).squaredNorm() / 40.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto back = Standardizer::from_json(Standardizer::fit(r).to_json());
  CHECK(back.apply(r) == zr);
  CHECK_THROWS_AS(s.apply(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("PCA on perfectly collinear points") {
  Matrix x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  const auto m = fit_pca(x, 1);
  CHECK(m.components(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(m.components(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(m.explained_variance(0) / m.total_variance == doctest::Approx(1.0));
}

TEST_CASE("PCA with k = d reconstructs and preserves norms") {
  Rng rng(11);
  const Matrix x = random_matrix(rng, 12, 4);
  const auto m = fit_pca(x, 4);
  const Matrix scores = transform_pca(m, x);
  CHECK((inverse_transform_pca(m, scores) - x).cwiseAbs().maxCoeff() < 1e-8);
  for (Index i = 0; i < x.rows(); ++i) {
    const double direct = (x.row(i).transpose() - m.mean).norm();
    CHECK(std::fabs(scores.row(i).norm() - direct) < 1e-8);
  }
  const Matrix at_mean = transform_pca(m, m.mean.transpose());
  CHECK(at_mean.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("PCA explained variance matches covariance eigenvalues") {
  Rng rng(20);
  const Matrix x = random_matrix(rng, 20, 5);
  const auto m = fit_pca(x, 3);
  const auto eig = oracle::symmetric_eigenvalues(oracle::sample_covariance(to_rows(x)));
  for (Index i = 0; i < 3; ++i) CHECK(std::fabs(m.explained_variance(i) - eig[static_cast<std::size_t>(i)]) < 1e-8);
  CHECK((m.components * m.components.transpose() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
  for (Index i = 1; i < 3; ++i) CHECK(m.explained_variance(i) <= m.explained_variance(i - 1));
  CHECK(m.explained_variance.sum() <= m.total_variance + 1e-8);

  const Matrix scores = transform_pca(m, x);
  for (Index c = 0; c < 3; ++c) {
    const double mean = scores.col(c).mean();
    const double var = (scores.col(c).array() - mean).square().sum() / 19.0;
    CHECK(std::fabs(var - m.explained_variance(c)) < 1e-8);
  }
}

TEST_CASE("randomized PCA agrees with the exact solver") {
  Rng rng(5);
  // Low-rank signal plus small noise, wide matrix.
  const Matrix basis = random_matrix(rng, 4, 60);
  const Matrix x = random_matrix(rng, 80, 4) * basis * 3.0 + random_matrix(rng, 80, 60) * 0.01;
  PcaOptions exact;
  exact.solver = PcaSolver::exact;
  PcaOptions randomized;
  randomized.solver = PcaSolver::randomized;
  randomized.seed = 9;
  const auto a = fit_pca(x, 4, exact);
  const auto b = fit_pca(x, 4, randomized);
  for (Index i = 0; i < 4; ++i) {
    CHECK(b.explained_variance(i) == doctest::Approx(a.explained_variance(i)).epsilon(1e-8));
    CHECK(std::fabs(std::fabs(a.components.row(i).dot(b.components.row(i))) - 1.0) < 1e-8);
  }
}

TEST_CASE("PCA argument errors") {
  Matrix same(4, 3);
  same.setConstant(2.0);
  CHECK_THROWS_AS(fit_pca(same, 1), NumericalError);
  Rng rng(1);
  const Matrix x = random_matrix(rng, 5, 3);
  CHECK_THROWS_AS(fit_pca(x, 0), InvalidArgument);
  CHECK_THROWS_AS(fit_pca(x, 4), InvalidArgument);
  CHECK_THROWS_AS(fit_pca(x.topRows(1), 1), InvalidArgument);
  const auto m = fit_pca(x, 2);
  CHECK_THROWS_AS(transform_pca(m, Matrix::Zero(2, 4)), DimensionMismatch);
  const auto back = PcaModel::from_json(m.to_json());
  CHECK(transform_pca(back, x) == transform_pca(m, x));
}

TEST_CASE("OLS exact line and constant target") {
  Matrix x(3, 1);
  x << 1, 2, 3;
  Vector y(3);
  y << 2, 4, 6;
  const auto s = ols_fit(x, y);
  CHECK(std::fabs(s.coefficients(0)) < 1e-12);
  CHECK(s.coefficients(1) == doctest::Approx(2.0));
  CHECK(s.r_squared_train == doctest::Approx(1.0));

  y << 5, 5, 5;
  const auto c = ols_fit(x, y);
  CHECK(std::fabs(c.coefficients(1)) < 1e-12);
  CHECK(c.coefficients(0) == doctest::Approx(5.0));
}

TEST_CASE("OLS matches the normal-equation oracle on seeded Gaussian designs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Matrix x = random_matrix(rng, 50, 3);
    Vector y(50);
    for (Index i = 0; i < 50; ++i) y(i) = 0.5 + 1.5 * x(i, 0) - 0.3 * x(i, 1) + rng.normal(0.0, 0.8);
    const auto s = ols_fit(x, y);
    REQUIRE(s.inference_available);
    std::vector<double> yv(y.data(), y.data() + y.size());
    const auto ref = oracle::ols_normal_equations(to_rows(x), yv);
    for (Index j = 0; j < 4; ++j) {
      const auto k = static_cast<std::size_t>(j);
      CHECK(std::fabs(s.coefficients(j) - ref.coefficients[k]) < 1e-8);
      CHECK(std::fabs(s.std_errors(j) - ref.std_errors[k]) < 1e-8);
      CHECK(std::fabs(s.p_values(j) - ref.p_values[k]) < 1e-8);
      CHECK(s.t_stats(j) == doctest::Approx(s.coefficients(j) / s.std_errors(j)));
    }
    // Residuals are orthogonal to every design column.
    const Vector resid = y - s.predict(x);
    CHECK(std::fabs(resid.sum()) < 1e-8);
    for (Index j = 0; j < 3; ++j) CHECK(std::fabs(x.col(j).dot(resid)) < 1e-8);
  }
}

TEST_CASE("OLS flags missing inference and rank deficiency") {
  Rng rng(7);
  const Matrix x = random_matrix(rng, 3, 2);
  Vector y(3);
  y << 1, 2, 4;
  const auto s = ols_fit(x, y);
  CHECK_FALSE(s.inference_available);
  CHECK(s.p_values.size() == 0);

  // Indicators that sum to the intercept column.
  Matrix dummy(40, 3);
  Vector t(40);
  for (Index i = 0; i < 40; ++i) {
    dummy(i, 0) = rng.normal();
    dummy(i, 1) = i % 2 == 0 ? 1.0 : 0.0;
    dummy(i, 2) = 1.0 - dummy(i, 1);
    t(i) = 2.0 * dummy(i, 0) + dummy(i, 1) + rng.normal(0.0, 0.1);
  }
  const auto r = ols_fit(dummy, t);
  CHECK(r.rank == 3);
  CHECK(r.inference_available);
  CHECK(r.unreliable[0]);
  CHECK_FALSE(r.unreliable[1]);
  CHECK(r.unreliable[2]);
  CHECK(r.unreliable[3]);
  CHECK(r.coefficients(1) == doctest::Approx(2.0).epsilon(0.05));
  // Estimable contrast between the two groups survives the collinearity.
  CHECK(r.coefficients(2) - r.coefficients(3) == doctest::Approx(1.0).epsilon(0.1));
  for (Index j = 0; j < 4; ++j) CHECK((r.p_values(j) >= 0.0 && r.p_values(j) <= 1.0));
}

TEST_CASE("OLS detects a 10-sigma effect") {
  Rng rng(42);
  const Matrix x = random_matrix(rng, 200, 4);
  Vector y(200);
  // Effect size chosen so the expected t statistic is about 10.
  const double beta = 10.0 / std::sqrt(200.0);
  for (Index i = 0; i < 200; ++i) y(i) = beta * x(i, 2) + rng.normal();
  const auto s = ols_fit(x, y);
  CHECK(s.p_values(3) < 1e-6);
}
