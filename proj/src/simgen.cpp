#include "lpep/simgen.hpp"

#include <cmath>

#include "lpep/glm.hpp"

namespace lpep {

void Scenario::validate() const {
  if (n < 1) throw ConfigError("scenario: n must be positive");
  if (p < 1) throw ConfigError("scenario: p must be positive");
  if (r < 0.0 || r >= 1.0) throw ConfigError("scenario: r must lie in [0,1)");
  true_coefficients(p_true, p);  // validates p_true against p
}

Vector true_coefficients(int p_true, int p) {
  const double b[5] = {2.0, -1.0, -1.0, 0.5, -0.5};
  Vector beta = Vector::Zero(p + 1);
  beta[0] = -0.5;
  auto place = [&](int start, double scale) {
    if (start + 4 > p)
      throw ArgumentError("true_coefficients: p too small for p_true block layout");
    for (int k = 0; k < 5; ++k) beta[start + k] = scale * b[k];
  };
  switch (p_true) {
    case 0:
      break;
    case 5:
      place(1, 1.0);
      break;
    case 10:
      place(1, 1.0);
      place(11, 1.0);
      break;
    case 20:
      place(1, 1.0);
      place(6, 0.5);
      place(11, 1.0);
      place(16, 0.5);
      break;
    default:
      throw ArgumentError("true_coefficients: p_true must be one of {0,5,10,20}");
  }
  return beta;
}

Matrix gen_design(int n, int p, double r, RngStream& rng) {
  if (r < 0.0 || r >= 1.0) throw ArgumentError("gen_design: r must lie in [0,1)");
  Matrix X(n, p + 1);
  X.col(0).setOnes();
  const double innov = std::sqrt(1.0 - r * r);
  for (int i = 0; i < n; ++i) {
    double prev = rng.normal();
    X(i, 1) = prev;
    for (int j = 2; j <= p; ++j) {
      prev = r * prev + innov * rng.normal();
      X(i, j) = prev;
    }
  }
  return X;
}

BinaryVector gen_response(const Matrix& X, const Vector& beta_true, RngStream& rng) {
  if (X.cols() != beta_true.size())
    throw ArgumentError("gen_response: dimension mismatch");
  const Vector eta = X * beta_true;
  BinaryVector y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double theta = 1.0 / (1.0 + std::exp(-eta[i]));
    y[i] = rng.uniform() < theta ? 1 : 0;
  }
  return y;
}

Dataset gen_dataset(const Scenario& scenario) {
  scenario.validate();
  RngStream design_rng(scenario.replication_seed, 0xD);
  RngStream response_rng(scenario.replication_seed, 0xE);
  const Matrix X = gen_design(scenario.n, scenario.p, scenario.r, design_rng);
  const Vector beta = true_coefficients(scenario.p_true, scenario.p);
  const BinaryVector y = gen_response(X, beta, response_rng);

  Dataset d;
  d.y = y;
  d.X = X;
  d.column_names.clear();
  d.column_names.push_back("(Intercept)");
  for (int j = 1; j <= scenario.p; ++j) d.column_names.push_back("x" + std::to_string(j));
  d.validate();
  return d;
}

}  // namespace lpep
