#include "lpep/glm.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace lpep {

double log1p_exp(double eta) {
  if (eta <= -37.0) return std::exp(eta);
  if (eta <= 18.0) return std::log1p(std::exp(eta));
  if (eta <= 30.0) return eta + std::log1p(std::exp(-eta));
  return eta + std::exp(-eta);
}

static inline double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  double e = std::exp(eta);
  return e / (1.0 + e);
}

static void check_dims(const Matrix& Xg, const BinaryVector& y, const Vector& beta) {
  if (beta.size() != Xg.cols())
    throw ArgumentError("glm: beta length " + std::to_string(beta.size()) +
                        " does not match design with " + std::to_string(Xg.cols()) +
                        " columns");
  if (y.size() != Xg.rows())
    throw ArgumentError("glm: response length does not match design rows");
  if (!beta.allFinite()) throw ArgumentError("glm: beta has non-finite entries");
}

double log_likelihood(const Matrix& Xg, const BinaryVector& y, const Vector& beta) {
  check_dims(Xg, y, beta);
  const Vector eta = Xg * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    ll += y[i] * eta[i] - log1p_exp(eta[i]);
  return ll;
}

std::pair<Vector, Matrix> score_and_information(const Matrix& Xg, const BinaryVector& y,
                                                const Vector& beta) {
  check_dims(Xg, y, beta);
  const Eigen::Index n = Xg.rows();
  const Vector eta = Xg * beta;
  Vector resid(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double th = sigmoid(eta[i]);
    resid[i] = static_cast<double>(y[i]) - th;
    w[i] = th * (1.0 - th);
  }
  Vector score = Xg.transpose() * resid;
  Matrix info = Xg.transpose() * w.asDiagonal() * Xg;
  return {std::move(score), std::move(info)};
}

GlmFit fit_mle(const Matrix& Xg, const BinaryVector& y, const std::optional<Vector>& init) {
  const Eigen::Index q = Xg.cols();
  Vector beta = init ? *init : Vector::Zero(q);
  if (beta.size() != q) throw ArgumentError("fit_mle: init length mismatch");

  GlmFit fit;
  double ll = log_likelihood(Xg, y, beta);
  int iter = 0;
  for (; iter < detail::kMaxNewtonIter; ++iter) {
    auto [score, info] = score_and_information(Xg, y, beta);
    if (score.lpNorm<Eigen::Infinity>() <= detail::kScoreTol) {
      fit.converged = true;
      break;
    }
    Eigen::LLT<Matrix> llt(info);
    if (llt.info() != Eigen::Success)
      throw NumericError("fit_mle: information matrix numerically singular");
    const Vector dir = llt.solve(score);
    // Non-decrease up to the rounding resolution of the log likelihood;
    // demanding strict improvement stalls the line search once the Newton
    // increment drops below one ulp of ll.
    const double slack = 1e-12 * (1.0 + std::abs(ll));
    double step = 1.0;
    Vector cand = beta + dir;
    double ll_cand = log_likelihood(Xg, y, cand);
    for (int h = 0; h < detail::kMaxHalvings && !(ll_cand >= ll - slack); ++h) {
      step *= 0.5;
      cand = beta + step * dir;
      ll_cand = log_likelihood(Xg, y, cand);
    }
    beta = cand;
    ll = ll_cand;
  }
  fit.beta_hat = beta;
  fit.log_lik_at_max = ll;
  fit.iterations = iter;
  auto [score, info] = score_and_information(Xg, y, beta);
  if (!fit.converged && score.lpNorm<Eigen::Infinity>() <= detail::kScoreTol)
    fit.converged = true;
  fit.info = std::move(info);
  return fit;
}

double log_likelihood(const Dataset& data, const ModelIndicator& model, const Vector& beta) {
  return log_likelihood(design_submatrix(data.X, model), data.y, beta);
}

std::pair<Vector, Matrix> score_and_information(const Dataset& data, const ModelIndicator& model,
                                                const Vector& beta) {
  return score_and_information(design_submatrix(data.X, model), data.y, beta);
}

GlmFit fit_mle(const Dataset& data, const ModelIndicator& model,
               const std::optional<Vector>& init) {
  return fit_mle(design_submatrix(data.X, model), data.y, init);
}

}  // namespace lpep
