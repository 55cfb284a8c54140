#include "lpep/inference.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lpep/glm.hpp"

namespace lpep {

namespace {

int popcount_key(const ModelIndicator::Key& k) {
  return __builtin_popcountll(k.w0) + __builtin_popcountll(k.w1);
}

ModelIndicator key_to_model(const ModelIndicator::Key& k, int p) {
  ModelIndicator m = ModelIndicator::null_model(p);
  for (int j = 1; j <= p; ++j) {
    const int b = j - 1;
    const bool on = b < 64 ? (k.w0 >> b) & 1 : (k.w1 >> (b - 64)) & 1;
    if (on) m.set(j, true);
  }
  return m;
}

}  // namespace

double quantile_type7(std::vector<double> values, double prob) {
  if (values.empty()) throw ArgumentError("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - lo) * (values[lo + 1] - values[lo]);
}

PosteriorSummary summarize(const DrawStore& draws) {
  const long m = draws.size();
  if (m == 0) throw ArgumentError("summarize: empty draw store");
  const int p = draws.p;

  PosteriorSummary out;
  out.pip = Vector::Zero(p);
  out.bma_mean = Vector::Zero(p + 1);

  std::unordered_map<ModelIndicator::Key, long, KeyHash> freq;
  double size_sum = 0.0, delta_sum = 0.0;
  for (long t = 0; t < m; ++t) {
    const auto& k = draws.gamma[t];
    ++freq[k];
    size_sum += popcount_key(k);
    delta_sum += draws.delta[t];
    for (int j = 1; j <= p; ++j) {
      const int b = j - 1;
      const bool on = b < 64 ? (k.w0 >> b) & 1 : (k.w1 >> (b - 64)) & 1;
      if (on) out.pip[j - 1] += 1.0;
    }
    for (int j = 0; j <= p; ++j) out.bma_mean[j] += draws.beta[t * (p + 1) + j];
  }
  out.pip /= static_cast<double>(m);
  out.bma_mean /= static_cast<double>(m);
  out.mean_model_size = size_sum / m;
  out.mean_delta = delta_sum / m;

  out.top_models.assign(freq.begin(), freq.end());
  std::vector<std::pair<ModelIndicator::Key, double>> probs;
  probs.reserve(freq.size());
  for (const auto& [k, c] : freq) probs.emplace_back(k, static_cast<double>(c) / m);
  std::sort(probs.begin(), probs.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    const int pa = popcount_key(a.first), pb = popcount_key(b.first);
    if (pa != pb) return pa < pb;
    return a.first < b.first;
  });
  out.top_models = std::move(probs);
  out.map_model = key_to_model(out.top_models.front().first, p);

  out.ci_lower.resize(p + 1);
  out.ci_upper.resize(p + 1);
  std::vector<double> column(m);
  for (int j = 0; j <= p; ++j) {
    for (long t = 0; t < m; ++t) column[t] = draws.beta[t * (p + 1) + j];
    out.ci_lower[j] = quantile_type7(column, 0.025);
    out.ci_upper[j] = quantile_type7(column, 0.975);
  }
  return out;
}

SelectionMetrics selection_metrics(const ModelIndicator& map_model, const ModelIndicator& truth) {
  if (map_model.p() != truth.p())
    throw ArgumentError("selection_metrics: dimension mismatch");
  const int p = truth.p();
  int tp = 0, fp = 0, fn = 0;
  for (int j = 1; j <= p; ++j) {
    const bool sel = map_model.includes(j), tru = truth.includes(j);
    tp += sel && tru;
    fp += sel && !tru;
    fn += !sel && tru;
  }
  SelectionMetrics out;
  out.size = map_model.p_gamma();
  out.exact_match = map_model == truth;
  if (truth.p_gamma() == 0) return out;  // F1 undefined for the null truth
  const double prec = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double rec = static_cast<double>(tp) / (tp + fn);
  out.f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  return out;
}

double amse(const Vector& bma_mean, const Vector& truth_beta, int p) {
  auto covariate_view = [p](const Vector& v) -> Vector {
    if (v.size() == p) return v;
    if (v.size() == p + 1) return v.tail(p);
    throw ArgumentError("amse: vector must have length p or p+1");
  };
  const Vector est = covariate_view(bma_mean);
  const Vector tru = covariate_view(truth_beta);
  return (est - tru).squaredNorm() / p;
}

Vector predict_bma(const DrawStore& draws, const Matrix& X_new) {
  const long m = draws.size();
  if (m == 0) throw ArgumentError("predict_bma: empty draw store");
  if (X_new.cols() != draws.p + 1)
    throw ArgumentError("predict_bma: X_new must have p+1 columns (intercept included)");
  const Eigen::Map<const Matrix> B(draws.beta.data(), draws.p + 1, m);  // column-major draws
  Vector phat = Vector::Zero(X_new.rows());
  Vector eta(X_new.rows());
  for (long t = 0; t < m; ++t) {
    eta = X_new * B.col(t);
    for (Eigen::Index i = 0; i < eta.size(); ++i)
      phat[i] += 1.0 / (1.0 + std::exp(-eta[i]));
  }
  return phat / static_cast<double>(m);
}

PredictionMetrics prediction_metrics(const BinaryVector& y, const Vector& phat) {
  const int n = static_cast<int>(y.size());
  if (phat.size() != n) throw ArgumentError("prediction_metrics: length mismatch");
  PredictionMetrics out;

  Vector pc(n);
  for (int i = 0; i < n; ++i) pc[i] = std::clamp(phat[i], 1e-12, 1.0 - 1e-12);

  double ls = 0.0, brier = 0.0;
  for (int i = 0; i < n; ++i) {
    ls -= y[i] * std::log(pc[i]) + (1 - y[i]) * std::log(1.0 - pc[i]);
    brier += (pc[i] - y[i]) * (pc[i] - y[i]);
  }
  out.ls = ls / n;
  out.brier = brier / n;

  const int n1 = y.sum();
  const int n0 = n - n1;
  if (n1 == 0 || n0 == 0) return out;  // AUC and CS undefined

  // AUC from midranks.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pc[a] < pc[b]; });
  std::vector<double> rank(n);
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && pc[order[j + 1]] == pc[order[i]]) ++j;
    const double mid = 0.5 * (i + j) + 1.0;
    for (int k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double rank_sum_pos = 0.0;
  for (int i = 0; i < n; ++i)
    if (y[i] == 1) rank_sum_pos += rank[i];
  out.auc = (rank_sum_pos - 0.5 * n1 * (n1 + 1.0)) / (static_cast<double>(n1) * n0);

  // Calibration slope: logistic refit of y on logit(phat).
  Matrix Xr(n, 2);
  for (int i = 0; i < n; ++i) {
    Xr(i, 0) = 1.0;
    Xr(i, 1) = std::log(pc[i] / (1.0 - pc[i]));
  }
  try {
    const GlmFit refit = fit_mle(Xr, y);
    out.cs = refit.beta_hat[1];
  } catch (const NumericError&) {
    // separation in the recalibration fit; slope reported missing
  }
  return out;
}

}  // namespace lpep
