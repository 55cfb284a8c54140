#include <doctest.h>

#include <cmath>

#include "lpep/simgen.hpp"

using namespace lpep;

TEST_CASE("true_coefficients block layout") {
  SUBCASE("null truth") {
    Vector b = true_coefficients(0, 20);
    CHECK(b[0] == -0.5);
    CHECK(b.tail(20).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SUBCASE("five-variable truth") {
    Vector b = true_coefficients(5, 20);
    CHECK(b[1] == 2.0);
    CHECK(b[2] == -1.0);
    CHECK(b[3] == -1.0);
    CHECK(b[4] == 0.5);
    CHECK(b[5] == -0.5);
    CHECK(b.tail(15).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SUBCASE("ten-variable truth splits across blocks 1:5 and 11:15") {
    Vector b = true_coefficients(10, 20);
    CHECK(b[11] == 2.0);
    CHECK(b[15] == -0.5);
    CHECK(b[6] == 0.0);
    CHECK(b[16] == 0.0);
  }
  SUBCASE("twenty-variable truth includes the half-scale blocks") {
    Vector b = true_coefficients(20, 20);
    CHECK(b[6] == 1.0);
    CHECK(b[7] == -0.5);
    CHECK(b[8] == -0.5);
    CHECK(b[9] == 0.25);
    CHECK(b[10] == -0.25);
    CHECK(b[16] == 1.0);
    CHECK(b[20] == -0.25);
  }
  CHECK_THROWS_AS(true_coefficients(7, 20), ArgumentError);
  CHECK_THROWS_AS(true_coefficients(20, 10), ArgumentError);
}

TEST_CASE("gen_design: uncorrelated columns at r = 0") {
  RngStream rng(1, 0);
  const int n = 20000;
  Matrix X = gen_design(n, 4, 0.0, rng);
  CHECK((X.col(0).array() == 1.0).all());
  for (int j = 1; j <= 4; ++j) {
    CHECK(std::abs(X.col(j).mean()) < 4.0 / std::sqrt(double(n)));
    const double var = (X.col(j).array() - X.col(j).mean()).square().sum() / (n - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
  }
  for (int j = 1; j < 4; ++j) {
    const double rho = (X.col(j).array() * X.col(j + 1).array()).sum() / n;
    CHECK(std::abs(rho) < 4.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("gen_design: AR(1) lag correlations at r = 0.75") {
  RngStream rng(2, 0);
  const int n = 100000;
  Matrix X = gen_design(n, 3, 0.75, rng);
  const double lag1 = (X.col(1).array() * X.col(2).array()).sum() / n;
  const double lag2 = (X.col(1).array() * X.col(3).array()).sum() / n;
  CHECK(lag1 == doctest::Approx(0.75).epsilon(0.0134));   // +-0.01 absolute
  CHECK(lag2 == doctest::Approx(0.5625).epsilon(0.02));   // r^2
}

TEST_CASE("gen_response: mean matches the inverse link") {
  RngStream rng(3, 0);
  const int n = 40000;
  Matrix X = Matrix::Ones(n, 1);
  SUBCASE("beta = 0 gives mean 1/2") {
    RngStream r2(4, 0);
    BinaryVector y = gen_response(X, Vector::Zero(1), r2);
    CHECK(std::abs(y.cast<double>().mean() - 0.5) < 4.0 / std::sqrt(double(n)));
  }
  SUBCASE("intercept -0.5 gives mean expit(-0.5)") {
    RngStream r2(5, 0);
    BinaryVector y = gen_response(X, Vector::Constant(1, -0.5), r2);
    const double target = 1.0 / (1.0 + std::exp(0.5));
    CHECK(std::abs(y.cast<double>().mean() - target) < 4.0 / std::sqrt(double(n)));
    CHECK(target == doctest::Approx(0.3775).epsilon(1e-3));
  }
}

TEST_CASE("gen_dataset is deterministic per seed") {
  Scenario sc;
  sc.n = 60;
  sc.p = 5;
  sc.p_true = 5;
  sc.r = 0.5;
  sc.replication_seed = 99;
  Dataset a = gen_dataset(sc);
  Dataset b = gen_dataset(sc);
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);
  sc.replication_seed = 100;
  Dataset c = gen_dataset(sc);
  CHECK(a.y != c.y);
}

TEST_CASE("scenario validation") {
  Scenario sc;
  sc.p_true = 20;
  sc.p = 19;
  CHECK_THROWS(sc.validate());
  sc.p = 20;
  sc.r = 1.0;
  CHECK_THROWS_AS(sc.validate(), ConfigError);
}
