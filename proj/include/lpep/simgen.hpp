#ifndef LPEP_SIMGEN_HPP_
#define LPEP_SIMGEN_HPP_

#include <cstdint>

#include "lpep/dataset.hpp"
#include "lpep/rng.hpp"

namespace lpep {

// One simulation scenario: AR(1)-correlated Gaussian design, block-sparse
// truth, Bernoulli-logistic responses.
struct Scenario {
  int n = 500;
  int p = 100;
  int p_true = 0;      // 0, 5, 10 or 20
  double r = 0.0;      // AR(1) correlation in [0,1)
  std::uint64_t replication_seed = 0;

  void validate() const;
};

// Intercept -0.5 and block layout over b = (2,-1,-1,0.5,-0.5):
//   p_true=5:  positions 1:5 = b
//   p_true=10: positions 1:5 = b, 11:15 = b
//   p_true=20: positions 1:5 = b, 6:10 = 0.5b, 11:15 = b, 16:20 = 0.5b
// Returned dense with intercept first (length p+1).
Vector true_coefficients(int p_true, int p);

// Rows i.i.d. N_p(0, R) with R_jk = r^|j-k| via the AR(1) recursion
// x_j = r x_{j-1} + sqrt(1-r^2) eps_j; intercept column prepended.
Matrix gen_design(int n, int p, double r, RngStream& rng);

// y_i ~ Bernoulli(expit(x_i' beta_true)); X includes the intercept column.
BinaryVector gen_response(const Matrix& X, const Vector& beta_true, RngStream& rng);

// Full dataset for a scenario (design stream and response stream are split
// off the replication seed, so datasets are byte-identical per seed).
Dataset gen_dataset(const Scenario& scenario);

}  // namespace lpep

#endif  // LPEP_SIMGEN_HPP_
