#ifndef LPEP_ORACLE_HPP_
#define LPEP_ORACLE_HPP_

#include <map>

#include "lpep/dataset.hpp"
#include "lpep/priors.hpp"

namespace lpep {

// Ground-truth posterior over the whole model space for tiny instances,
// computed by enumerating every admissible imaginary sample and integrating
// the regression coefficients by mode-centered Gauss-Hermite quadrature.
struct OracleResult {
  int p = 0;
  std::map<ModelIndicator::Key, double> model_log_marginals;
  std::map<ModelIndicator::Key, double> model_posteriors;
  double ystar_normalizer = 0.0;  // sum of m~*(y*) over admissible y*

  double posterior(const ModelIndicator& m) const { return model_posteriors.at(m.key()); }
};

// Enumeration bounds n <= 12, p <= 3 are hard limits unless allow_large.
// FixedUnitInfo integrates beta only; random-delta priors additionally run a
// 64-node outer quadrature over delta.
OracleResult exact_model_posterior(const Dataset& data, const DeltaPrior& dprior,
                                   int quad_order = 32, const ModelPrior& mprior = ModelPrior{},
                                   bool allow_large = false);

}  // namespace lpep

#endif  // LPEP_ORACLE_HPP_
