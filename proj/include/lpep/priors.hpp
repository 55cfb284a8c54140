#ifndef LPEP_PRIORS_HPP_
#define LPEP_PRIORS_HPP_

#include "lpep/dataset.hpp"
#include "lpep/glm.hpp"
#include "lpep/rng.hpp"
#include "lpep/separation.hpp"

namespace lpep {

enum class DeltaPriorKind { FixedUnitInfo, HyperGOverN, Robust };

// Hyperprior on the power parameter delta. n_star is the imaginary-sample
// size (= n throughout).
struct DeltaPrior {
  DeltaPriorKind kind = DeltaPriorKind::FixedUnitInfo;
  int n_star = 1;

  bool is_fixed() const { return kind == DeltaPriorKind::FixedUnitInfo; }
};

// Beta-Binomial prior over model size; a = b = 1 is uniform-on-size.
struct ModelPrior {
  double a = 1.0;
  double b = 1.0;
};

// An imaginary response vector together with its admissibility status
// (admissible <=> non-separable under the full design).
struct ImaginarySample {
  BinaryVector ystar;
  int sum = 0;
  bool admissible = false;

  int n() const { return static_cast<int>(ystar.size()); }
};

ImaginarySample make_imaginary_sample(const BinaryVector& ystar, const Dataset& data);

// Log hyperprior density at delta for the given model.
//   HyperGOverN:   log[(1 + delta/n*)^-2] on delta > 0 (paper display; the
//                  1/n* normalizer is omitted and cancels in every ratio)
//   Robust:        log[(n*+1)^{1/2} / (2 (p_g+1)^{1/2} (delta+1)^{3/2})]
//                  on delta > (n* - p_g)/(p_g + 1), normalized
//   FixedUnitInfo: 0 at delta = n*, -inf elsewhere (point mass)
double delta_log_prior(const DeltaPrior& prior, double delta, const ModelIndicator& model);

// Lower endpoint of the prior support (the reflection boundary a_gamma).
double delta_support_lower(const DeltaPrior& prior, const ModelIndicator& model);

// Inverse-CDF draw from the hyperprior (used only for chain initialization).
double delta_prior_sample(const DeltaPrior& prior, const ModelIndicator& model, RngStream& rng);

// Beta-Binomial(a,b) log prior mass of a model with p_gamma of p covariates:
// log[ B(a+p_g, b+p-p_g) / B(a,b) ].
double model_log_prior(const ModelPrior& prior, const ModelIndicator& model, int p);

// log m~*(y*): the Beta-Binomial(1/2,1/2) null predictive restricted to the
// admissible set A(X). Unnormalized over A(X); the normalizer cancels in all
// Metropolis-Hastings ratios. Returns -inf for inadmissible y*.
double imaginary_log_weight(const ImaginarySample& ys, const Dataset& data);

// log phi(beta | beta_hat(y*), delta H^{-1}(y*)), evaluated through the
// Cholesky factor of the information matrix (no explicit inverse).
double lpep_conditional_logpdf(const Vector& beta, const GlmFit& fit_star, double delta);

// log of the delta-marginalized conditional LPEP density
//   integral of phi(beta | beta_hat(y*), delta H^{-1}(y*)) f(delta|gamma) d delta
// for one admissible y*, by adaptive log-spaced trapezoid quadrature.
// Property-test instrumentation, not used by the sampler.
double lpep_marginal_logpdf(const Vector& beta, const ImaginarySample& ys,
                            const ModelIndicator& model, const DeltaPrior& dprior,
                            const Dataset& data);

}  // namespace lpep

#endif  // LPEP_PRIORS_HPP_
