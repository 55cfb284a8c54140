#include "lpep/priors.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace lpep {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

double logsumexp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}
}  // namespace

ImaginarySample make_imaginary_sample(const BinaryVector& ystar, const Dataset& data) {
  if (ystar.size() != data.n())
    throw ArgumentError("make_imaginary_sample: length mismatch");
  ImaginarySample ys;
  ys.ystar = ystar;
  ys.sum = ystar.sum();
  ys.admissible = !detect_separation(data.X, ystar).separated;
  return ys;
}

double delta_log_prior(const DeltaPrior& prior, double delta, const ModelIndicator& model) {
  if (!(delta > 0.0)) throw ArgumentError("delta_log_prior: delta must be positive");
  switch (prior.kind) {
    case DeltaPriorKind::HyperGOverN:
      return -2.0 * std::log1p(delta / prior.n_star);
    case DeltaPriorKind::Robust: {
      const double a_g = delta_support_lower(prior, model);
      if (delta <= a_g) return kNegInf;
      const double pg1 = model.p_gamma() + 1.0;
      return 0.5 * std::log(prior.n_star + 1.0) - std::log(2.0) - 0.5 * std::log(pg1) -
             1.5 * std::log1p(delta);
    }
    case DeltaPriorKind::FixedUnitInfo:
      return delta == static_cast<double>(prior.n_star) ? 0.0 : kNegInf;
  }
  return kNegInf;
}

double delta_support_lower(const DeltaPrior& prior, const ModelIndicator& model) {
  switch (prior.kind) {
    case DeltaPriorKind::HyperGOverN:
      return 0.0;
    case DeltaPriorKind::Robust:
      return (prior.n_star - model.p_gamma()) / (model.p_gamma() + 1.0);
    case DeltaPriorKind::FixedUnitInfo:
      return static_cast<double>(prior.n_star);
  }
  return 0.0;
}

double delta_prior_sample(const DeltaPrior& prior, const ModelIndicator& model, RngStream& rng) {
  switch (prior.kind) {
    case DeltaPriorKind::FixedUnitInfo:
      return static_cast<double>(prior.n_star);
    case DeltaPriorKind::HyperGOverN: {
      // CDF F(d) = 1 - (1 + d/n*)^{-1}.
      const double u = rng.uniform_pos();
      return prior.n_star * u / (1.0 - u);
    }
    case DeltaPriorKind::Robust: {
      // CDF F(d) = 1 - ((a_g + 1)/(d + 1))^{1/2} on (a_g, inf).
      const double a_g = delta_support_lower(prior, model);
      const double u = rng.uniform();
      const double one_minus = std::max(1.0 - u, 1e-300);
      return (a_g + 1.0) / (one_minus * one_minus) - 1.0;
    }
  }
  return static_cast<double>(prior.n_star);
}

double model_log_prior(const ModelPrior& prior, const ModelIndicator& model, int p) {
  const int pg = model.p_gamma();
  if (pg < 0 || pg > p) throw ArgumentError("model_log_prior: p_gamma out of range");
  auto log_beta = [](double x, double y) {
    return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
  };
  return log_beta(prior.a + pg, prior.b + p - pg) - log_beta(prior.a, prior.b);
}

double imaginary_log_weight(const ImaginarySample& ys, const Dataset& data) {
  if (ys.n() != data.n()) throw ArgumentError("imaginary_log_weight: length mismatch");
  if (!ys.admissible) return kNegInf;
  const double n = ys.n();
  const double s = ys.sum;
  return std::lgamma(s + 0.5) + std::lgamma(n - s + 0.5) - std::lgamma(n + 1.0) -
         2.0 * std::lgamma(0.5);
}

double lpep_conditional_logpdf(const Vector& beta, const GlmFit& fit_star, double delta) {
  if (!(delta > 0.0)) throw ArgumentError("lpep_conditional_logpdf: delta must be positive");
  const Eigen::Index q = fit_star.beta_hat.size();
  if (beta.size() != q) throw ArgumentError("lpep_conditional_logpdf: dimension mismatch");
  Eigen::LLT<Matrix> llt(fit_star.info);
  if (llt.info() != Eigen::Success)
    throw NumericError("lpep_conditional_logpdf: information matrix not positive definite");
  double half_logdet_h = 0.0;
  for (Eigen::Index j = 0; j < q; ++j) half_logdet_h += std::log(llt.matrixL()(j, j));
  const Vector diff = beta - fit_star.beta_hat;
  // (beta - bhat)' H (beta - bhat) = || L' diff ||^2
  const double quad = (llt.matrixU() * diff).squaredNorm();
  return half_logdet_h - 0.5 * q * (kLog2Pi + std::log(delta)) - quad / (2.0 * delta);
}

double lpep_marginal_logpdf(const Vector& beta, const ImaginarySample& ys,
                            const ModelIndicator& model, const DeltaPrior& dprior,
                            const Dataset& data) {
  if (!ys.admissible) throw ArgumentError("lpep_marginal_logpdf: y* not admissible");
  const GlmFit fit = fit_mle(design_submatrix(data.X, model), ys.ystar);
  if (dprior.is_fixed())
    return lpep_conditional_logpdf(beta, fit, static_cast<double>(dprior.n_star));

  const double lo = std::max(delta_support_lower(dprior, model), 1e-6);
  const double hi = 1e6 * dprior.n_star;
  const double log_lo = std::log(lo), log_hi = std::log(hi);

  auto integrate = [&](int points) {
    std::vector<double> seg;
    seg.reserve(points);
    double prev_t = log_lo;
    double prev_f = kNegInf;
    {
      const double d = std::exp(prev_t);
      prev_f = lpep_conditional_logpdf(beta, fit, d) + delta_log_prior(dprior, d, model);
    }
    for (int i = 1; i < points; ++i) {
      const double t = log_lo + (log_hi - log_lo) * i / (points - 1);
      const double d = std::exp(t);
      const double f = lpep_conditional_logpdf(beta, fit, d) + delta_log_prior(dprior, d, model);
      // trapezoid on the original delta axis: width = exp(t) - exp(prev_t)
      const double width = std::exp(t) - std::exp(prev_t);
      const double seg_log = std::log(0.5 * width) +
                             logsumexp({prev_f, f});
      seg.push_back(seg_log);
      prev_t = t;
      prev_f = f;
    }
    return logsumexp(seg);
  };

  int points = 201;
  double val = integrate(points);
  for (int round = 0; round < 8; ++round) {
    points = 2 * (points - 1) + 1;
    const double refined = integrate(points);
    const bool done = std::abs(refined - val) <= 1e-6;
    val = refined;
    if (done) break;
  }
  return val;
}

}  // namespace lpep
