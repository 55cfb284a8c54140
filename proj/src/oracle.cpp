#include "lpep/oracle.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>
#include <vector>

#include "lpep/glm.hpp"
#include "lpep/quadrature.hpp"
#include "lpep/separation.hpp"

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

int worker_count(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LPEP_THREADS")) {
    const long cap = std::atol(env);
    if (cap >= 1 && cap < static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(std::min<std::size_t>(hw, jobs));
}

// log integral of f_gamma(y|beta) * phi(beta; beta_hat(y*), delta H^{-1}) dbeta
// by tensor Gauss-Hermite centered at the Laplace mode of the integrand.
double log_inner_integral(const Matrix& Xg, const BinaryVector& y, const GlmFit& fit,
                          double delta, const QuadratureRule& gh) {
  const int q = static_cast<int>(Xg.cols());
  const int order = static_cast<int>(gh.nodes.size());

  Eigen::LLT<Matrix> lltH(fit.info);
  if (lltH.info() != Eigen::Success)
    throw NumericError("oracle: prior information matrix not positive definite");
  double half_logdet_h = 0.0;
  for (int j = 0; j < q; ++j) half_logdet_h += std::log(lltH.matrixL()(j, j));
  const double log_prior_const = half_logdet_h - 0.5 * q * (kLog2Pi + std::log(delta));

  auto log_integrand = [&](const Vector& beta) {
    const double quad = (lltH.matrixU() * (beta - fit.beta_hat)).squaredNorm();
    return log_likelihood(Xg, y, beta) + log_prior_const - quad / (2.0 * delta);
  };

  // Newton to the mode of the (strictly concave) integrand.
  Vector mode = fit.beta_hat;
  double g_val = log_integrand(mode);
  for (int iter = 0; iter < 100; ++iter) {
    auto [score, info] = score_and_information(Xg, y, mode);
    const Vector grad = score - (fit.info * (mode - fit.beta_hat)) / delta;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-10) break;
    const Matrix hess = info + fit.info / delta;
    Eigen::LLT<Matrix> llt(hess);
    if (llt.info() != Eigen::Success) throw NumericError("oracle: mode Hessian not PD");
    const Vector dir = llt.solve(grad);
    double step = 1.0;
    Vector cand = mode + dir;
    double cand_val = log_integrand(cand);
    for (int h = 0; h < 30 && !(cand_val >= g_val); ++h) {
      step *= 0.5;
      cand = mode + step * dir;
      cand_val = log_integrand(cand);
    }
    mode = cand;
    g_val = cand_val;
  }

  auto [score_m, info_m] = score_and_information(Xg, y, mode);
  const Matrix curvature = info_m + fit.info / delta;
  Eigen::LLT<Matrix> lltC(curvature);
  if (lltC.info() != Eigen::Success) throw NumericError("oracle: curvature not PD");
  double logdet_l = 0.0;
  for (int j = 0; j < q; ++j) logdet_l += std::log(lltC.matrixL()(j, j));

  // beta = mode + sqrt(2) L^{-T} u over the tensor grid.
  long total = 1;
  for (int j = 0; j < q; ++j) total *= order;
  std::vector<double> terms(total);
  std::vector<int> digit(q, 0);
  Vector u(q), beta(q);
  const Vector log_w = gh.weights.array().log();
  for (long k = 0; k < total; ++k) {
    double lw = 0.0, uu = 0.0;
    for (int j = 0; j < q; ++j) {
      u[j] = gh.nodes[digit[j]];
      lw += log_w[digit[j]];
      uu += u[j] * u[j];
    }
    beta = mode + std::sqrt(2.0) * lltC.matrixU().solve(u);
    terms[k] = lw + log_integrand(beta) + uu;
    for (int j = 0; j < q; ++j) {
      if (++digit[j] < order) break;
      digit[j] = 0;
    }
  }
  return 0.5 * q * std::log(2.0) - logdet_l + logsumexp(terms);
}

}  // namespace

OracleResult exact_model_posterior(const Dataset& data, const DeltaPrior& dprior, int quad_order,
                                   const ModelPrior& mprior, bool allow_large) {
  data.validate();
  const int n = data.n();
  const int p = data.p();
  if (!allow_large && (n > 12 || p > 3))
    throw ConfigError("oracle: enumeration bound is n <= 12, p <= 3 (override to force)");
  if (quad_order < 2) throw ArgumentError("oracle: quad_order too small");

  // Admissible imaginary samples and their Beta-Binomial(1/2,1/2) weights.
  std::vector<BinaryVector> ystars;
  std::vector<double> log_w;
  const long limit = 1L << n;
  for (long code = 0; code < limit; ++code) {
    BinaryVector ys(n);
    for (int i = 0; i < n; ++i) ys[i] = (code >> i) & 1;
    if (detect_separation(data.X, ys).separated) continue;
    const double s = ys.sum();
    ystars.push_back(std::move(ys));
    log_w.push_back(std::lgamma(s + 0.5) + std::lgamma(n - s + 0.5) - std::lgamma(n + 1.0) -
                    2.0 * std::lgamma(0.5));
  }
  if (ystars.empty()) throw ConfigError("oracle: every imaginary sample is separable");

  const double log_z = logsumexp(log_w);

  const QuadratureRule gh = gauss_hermite(quad_order);
  QuadratureRule gl;  // outer delta rule for random-delta priors

  OracleResult out;
  out.p = p;
  out.ystar_normalizer = std::exp(log_z);

  std::vector<double> log_marginals;
  std::vector<ModelIndicator::Key> keys;

  for (long mcode = 0; mcode < (1L << p); ++mcode) {
    ModelIndicator model = ModelIndicator::null_model(p);
    for (int j = 0; j < p; ++j)
      if ((mcode >> j) & 1) model.set(j + 1, true);
    const Matrix Xg = design_submatrix(data.X, model);

    if (!dprior.is_fixed()) {
      const double lo = std::max(delta_support_lower(dprior, model), 1e-6);
      gl = gauss_legendre(64, std::log(lo), std::log(1e6 * dprior.n_star));
    }

    std::vector<double> per_ystar(ystars.size());
    const int workers = worker_count(ystars.size());
    auto run_slice = [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const GlmFit fit = fit_mle(Xg, ystars[k]);
        double li;
        if (dprior.is_fixed()) {
          li = log_inner_integral(Xg, data.y, fit, static_cast<double>(dprior.n_star), gh);
        } else {
          std::vector<double> nodes(gl.nodes.size());
          for (std::size_t t = 0; t < nodes.size(); ++t) {
            const double d = std::exp(gl.nodes[t]);
            nodes[t] = log_inner_integral(Xg, data.y, fit, d, gh) +
                       delta_log_prior(dprior, d, model) + std::log(gl.weights[t] * d);
          }
          li = logsumexp(nodes);
        }
        per_ystar[k] = log_w[k] - log_z + li;
      }
    };
    if (workers <= 1) {
      run_slice(0, ystars.size());
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (ystars.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(ystars.size(), b + chunk);
        if (b < e) pool.emplace_back(run_slice, b, e);
      }
      for (auto& th : pool) th.join();
    }

    keys.push_back(model.key());
    log_marginals.push_back(logsumexp(per_ystar));
    out.model_log_marginals[model.key()] = log_marginals.back();
    log_marginals.back() += model_log_prior(mprior, model, p);
  }

  const double norm = logsumexp(log_marginals);
  for (std::size_t k = 0; k < keys.size(); ++k)
    out.model_posteriors[keys[k]] = std::exp(log_marginals[k] - norm);
  return out;
}

}  // namespace lpep
