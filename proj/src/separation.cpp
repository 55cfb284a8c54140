#include "lpep/separation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "lpep/glm.hpp"

namespace lpep {

namespace {

constexpr double kOptTol = 1e-9;   // positive-optimum certification threshold
constexpr double kPivTol = 1e-10;  // dual feasibility / ratio-test tolerance

enum class Side : std::uint8_t { Lower, Upper };

// IRLS divergence heuristic: run the Newton fit and flag separation when the
// coefficients blow up without the score vanishing.
SeparationReport irls_fallback(const Matrix& X, const BinaryVector& y) {
  SeparationReport rep;
  rep.detector = "irls";
  try {
    GlmFit fit = fit_mle(X, y);
    rep.separated = fit.beta_hat.lpNorm<Eigen::Infinity>() > 1e4;
    if (rep.separated) rep.witness_direction = fit.beta_hat.normalized();
  } catch (const NumericError&) {
    // Information matrix collapsed along the way; that only happens when the
    // fitted probabilities saturate, i.e. under separation.
    rep.separated = true;
  }
  return rep;
}

}  // namespace

SeparationReport detect_separation(const Matrix& X, const BinaryVector& y) {
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(X.cols());
  if (y.size() != n) throw ArgumentError("detect_separation: y length mismatch");

  // Fast overlap certificate: a converged MLE with strictly interior fitted
  // probabilities makes w_i = |y_i - theta_i| > 0 a positive null vector of
  // A' (the score equation is sum_i (2y_i-1) w_i x_i = 0), which by Stiemke's
  // lemma rules out any separating direction. The LP below is then only
  // needed when Newton fails to certify, and it alone decides the separated
  // cases and produces witnesses.
  try {
    GlmFit fit = fit_mle(X, y);
    if (fit.converged && (X * fit.beta_hat).lpNorm<Eigen::Infinity>() <= 30.0) {
      SeparationReport rep;
      rep.separated = false;
      rep.lp_optimum = 0.0;
      return rep;
    }
  } catch (const NumericError&) {
    // saturated information matrix; fall through to the LP
  }

  // A has rows (2y_i - 1) x_i'.
  Matrix A(n, m);
  for (int i = 0; i < n; ++i) A.row(i) = (2.0 * y[i] - 1.0) * X.row(i);
  const Vector c = A.colwise().sum().transpose();

  SeparationReport rep;
  if (c.lpNorm<Eigen::Infinity>() < kPivTol && n > 0) {
    // Objective identically ~0 over the feasible set; optimum is 0.
    return rep;
  }

  // Initial vertex b = 0: every row is tight at its lower bound. Pick m
  // linearly independent rows for the working set.
  Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < m) {
    // Rank-deficient design; restrict to the column space via the fallback.
    return irls_fallback(X, y);
  }
  std::vector<int> active(m);
  std::vector<Side> side(m, Side::Lower);
  std::vector<char> in_working_set(n, 0);
  for (int k = 0; k < m; ++k) {
    active[k] = static_cast<int>(qr.colsPermutation().indices()[k]);
    in_working_set[active[k]] = 1;
  }

  Vector b = Vector::Zero(m);
  Vector v = Vector::Zero(n);  // maintained A*b
  Matrix B(m, m);
  const long max_pivots = 200 + 50L * (n + m);

  for (long pivot = 0; pivot < max_pivots; ++pivot) {
    for (int k = 0; k < m; ++k) B.row(k) = A.row(active[k]);
    Eigen::PartialPivLU<Matrix> lu(B);

    // Early certification: any feasible point with positive objective is
    // already a separation witness.
    const double obj = c.dot(b);
    if (obj > kOptTol) {
      rep.separated = true;
      rep.lp_optimum = obj;
      rep.witness_direction = b;
      return rep;
    }

    // Reduced costs: c = B' * lambda.
    const Vector lambda = lu.transpose().solve(c);
    int enter = -1;
    double dir_sign = 1.0;
    for (int k = 0; k < m; ++k) {  // Bland: first eligible index
      if (side[k] == Side::Lower && lambda[k] > kPivTol) {
        enter = k;
        dir_sign = 1.0;
        break;
      }
      if (side[k] == Side::Upper && lambda[k] < -kPivTol) {
        enter = k;
        dir_sign = -1.0;
        break;
      }
    }
    if (enter < 0) {
      rep.lp_optimum = std::max(obj, 0.0);
      rep.separated = rep.lp_optimum > kOptTol;
      if (rep.separated) rep.witness_direction = b;
      return rep;
    }

    const Vector d = lu.solve(dir_sign * Vector::Unit(m, enter));

    // Ratio test over all rows.
    const Vector g = A * d;
    double t_best = std::numeric_limits<double>::infinity();
    int block = -1;
    Side block_side = Side::Lower;
    for (int i = 0; i < n; ++i) {
      if (in_working_set[i] && i != active[enter]) continue;
      if (g[i] > kPivTol) {
        const double t = (1.0 - v[i]) / g[i];
        if (t < t_best - kPivTol || (t < t_best + kPivTol && (block < 0 || i < block))) {
          t_best = std::max(t, 0.0);
          block = i;
          block_side = Side::Upper;
        }
      } else if (g[i] < -kPivTol) {
        const double t = v[i] / (-g[i]);
        if (t < t_best - kPivTol || (t < t_best + kPivTol && (block < 0 || i < block))) {
          t_best = std::max(t, 0.0);
          block = i;
          block_side = Side::Lower;
        }
      }
    }
    if (block < 0) {
      // Cannot happen for this LP (the entering row blocks itself at its
      // opposite bound); treat as a numerical breakdown.
      return irls_fallback(X, y);
    }
    b += t_best * d;
    v += t_best * g;
    in_working_set[active[enter]] = 0;
    in_working_set[block] = 1;
    active[enter] = block;
    side[enter] = block_side;
  }
  return irls_fallback(X, y);
}

}  // namespace lpep
