#ifndef LPEP_GLM_HPP_
#define LPEP_GLM_HPP_

#include <optional>
#include <utility>

#include "lpep/dataset.hpp"

namespace lpep {

// MLE and observed information of a logistic model for one (design, response)
// pair. info is X' diag(theta(1-theta)) X evaluated at beta_hat.
struct GlmFit {
  Vector beta_hat;
  Matrix info;
  double log_lik_at_max = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Overflow-safe log(1 + exp(eta)).
double log1p_exp(double eta);

// Bernoulli-logistic log likelihood sum_i [ y_i eta_i - log(1+exp(eta_i)) ].
double log_likelihood(const Matrix& Xg, const BinaryVector& y, const Vector& beta);

// Score X'(y - theta) and observed information X' diag(theta(1-theta)) X.
std::pair<Vector, Matrix> score_and_information(const Matrix& Xg, const BinaryVector& y,
                                                const Vector& beta);

// Newton iterations with step-halving; converges when the sup-norm of the
// score drops to 1e-8, gives up after 100 iterations. The response must be
// non-separable under the full design (caller's responsibility).
GlmFit fit_mle(const Matrix& Xg, const BinaryVector& y,
               const std::optional<Vector>& init = std::nullopt);

// Dataset-level wrappers operating on the model's design submatrix.
double log_likelihood(const Dataset& data, const ModelIndicator& model, const Vector& beta);
std::pair<Vector, Matrix> score_and_information(const Dataset& data, const ModelIndicator& model,
                                                const Vector& beta);
GlmFit fit_mle(const Dataset& data, const ModelIndicator& model,
               const std::optional<Vector>& init = std::nullopt);

namespace detail {
constexpr double kScoreTol = 1e-8;
constexpr int kMaxNewtonIter = 100;
constexpr int kMaxHalvings = 30;
}  // namespace detail

}  // namespace lpep

#endif  // LPEP_GLM_HPP_
