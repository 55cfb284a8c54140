#ifndef LPEP_INFERENCE_HPP_
#define LPEP_INFERENCE_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "lpep/dataset.hpp"
#include "lpep/sampler.hpp"

namespace lpep {

struct PosteriorSummary {
  Vector pip;  // length p, covariates 1..p
  std::vector<std::pair<ModelIndicator::Key, double>> top_models;  // descending
  ModelIndicator map_model;
  Vector bma_mean;   // length p+1, zeros pooled from exclusion draws
  Vector ci_lower;   // 95% equal-tailed, model-averaged including point mass
  Vector ci_upper;
  double mean_model_size = 0.0;
  double mean_delta = 0.0;
};

// Pure deterministic reduction of a DrawStore. MAP ties break toward the
// smaller model, then the lexicographically smaller bitmask.
PosteriorSummary summarize(const DrawStore& draws);

struct SelectionMetrics {
  std::optional<double> f1;  // missing when the true model is null
  bool exact_match = false;
  int size = 0;
};
SelectionMetrics selection_metrics(const ModelIndicator& map_model, const ModelIndicator& truth);

// Mean squared error over the p covariate coefficients (intercept excluded).
// Accepts either covariate-only vectors (length p) or dense ones (length p+1).
double amse(const Vector& bma_mean, const Vector& truth_beta, int p);

// Model-averaged predictive probabilities, mean over draws of expit(x'beta).
Vector predict_bma(const DrawStore& draws, const Matrix& X_new);

struct PredictionMetrics {
  std::optional<double> auc;  // rank statistic with midrank ties
  std::optional<double> cs;   // slope of the logistic recalibration fit
  double ls = 0.0;            // logarithmic score
  double brier = 0.0;
};
PredictionMetrics prediction_metrics(const BinaryVector& y, const Vector& phat);

// Type-7 (linear interpolation) quantile of unsorted values, exposed for the
// sort-based cross-checks.
double quantile_type7(std::vector<double> values, double prob);

}  // namespace lpep

#endif  // LPEP_INFERENCE_HPP_
