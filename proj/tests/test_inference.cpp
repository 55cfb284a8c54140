#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lpep/inference.hpp"
#include "test_support.hpp"

using namespace lpep;

namespace {

DrawStore single_model_store(int p, const std::vector<int>& bits, const Vector& beta, long reps) {
  DrawStore ds;
  ds.p = p;
  ModelIndicator m = ModelIndicator::from_bits(p, bits);
  Vector active(m.dim());
  const auto cols = m.active_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) active[k] = beta[cols[k]];
  for (long t = 0; t < reps; ++t) ds.append_record(m, 8.0, active);
  return ds;
}

}  // namespace

TEST_CASE("summarize: degenerate store gives 0/1 PIPs and zero-width intervals") {
  Vector beta(4);
  beta << 0.5, -1.0, 0.0, 2.0;
  DrawStore ds = single_model_store(3, {1, 0, 1}, beta, 50);
  PosteriorSummary s = summarize(ds);
  CHECK(s.pip[0] == 1.0);
  CHECK(s.pip[1] == 0.0);
  CHECK(s.pip[2] == 1.0);
  CHECK(s.top_models.size() == 1);
  CHECK(s.top_models[0].second == 1.0);
  for (int j = 0; j <= 3; ++j) {
    CHECK(s.ci_lower[j] == s.ci_upper[j]);
    CHECK(s.ci_lower[j] == s.bma_mean[j]);
  }
  CHECK(s.mean_delta == 8.0);
  CHECK(s.mean_model_size == 2.0);
}

TEST_CASE("summarize: PIP equals the sum of containing-model probabilities") {
  RngStream rng(60, 0);
  DrawStore ds;
  ds.p = 3;
  for (int t = 0; t < 5000; ++t) {
    ModelIndicator m = ModelIndicator::null_model(3);
    for (int j = 1; j <= 3; ++j)
      if (rng.uniform() < 0.4) m.set(j, true);
    Vector active = Vector::Constant(m.dim(), rng.normal());
    ds.append_record(m, 1.0, active);
  }
  PosteriorSummary s = summarize(ds);
  for (int j = 1; j <= 3; ++j) {
    double total = 0.0;
    for (const auto& [k, prob] : s.top_models) {
      const bool on = (k.w0 >> (j - 1)) & 1;
      if (on) total += prob;
    }
    CHECK(s.pip[j - 1] == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("summarize: merge-then-summarize equals summarize-of-concatenation") {
  RngStream rng(61, 0);
  std::vector<DrawStore> chains(3);
  for (auto& c : chains) {
    c.p = 2;
    for (int t = 0; t < 200; ++t) {
      ModelIndicator m = ModelIndicator::null_model(2);
      if (rng.uniform() < 0.5) m.set(1, true);
      if (rng.uniform() < 0.3) m.set(2, true);
      Vector active = Vector::Constant(m.dim(), rng.normal());
      c.append_record(m, rng.uniform() * 10, active);
    }
  }
  DrawStore merged = DrawStore::merge(chains);
  PosteriorSummary a = summarize(merged);
  PosteriorSummary b = summarize(merged);  // determinism
  CHECK(a.bma_mean == b.bma_mean);
  CHECK(a.pip == b.pip);
  CHECK(merged.size() == 600);
}

TEST_CASE("summarize: MAP tie-break prefers the smaller model") {
  DrawStore ds;
  ds.p = 2;
  ModelIndicator small = ModelIndicator::from_bits(2, {1, 0});
  ModelIndicator large = ModelIndicator::from_bits(2, {1, 1});
  Vector a1 = Vector::Constant(2, 1.0), a2 = Vector::Constant(3, 1.0);
  for (int t = 0; t < 10; ++t) {
    ds.append_record(small, 1.0, a1);
    ds.append_record(large, 1.0, a2);
  }
  PosteriorSummary s = summarize(ds);
  CHECK(s.map_model == small);
}

TEST_CASE("percentiles cross-check against an independent sort-based reference") {
  RngStream rng(62, 0);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = rng.normal() * 3.0 + 1.0;

  auto reference = [](std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double idx = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const double frac = idx - lo;
    return lo + 1 < v.size() ? v[lo] * (1 - frac) + v[lo + 1] * frac : v.back();
  };
  for (double q : {0.025, 0.25, 0.5, 0.975})
    CHECK(quantile_type7(xs, q) == doctest::Approx(reference(xs, q)).epsilon(1e-12));
}

TEST_CASE("selection_metrics spec examples") {
  const int p = 12;
  auto model_with = [&](std::initializer_list<int> idx) {
    ModelIndicator m = ModelIndicator::null_model(p);
    for (int j : idx) m.set(j, true);
    return m;
  };
  SUBCASE("exact match on a 5-variable truth") {
    ModelIndicator t = model_with({1, 2, 3, 4, 5});
    SelectionMetrics sm = selection_metrics(t, t);
    CHECK(sm.exact_match);
    REQUIRE(sm.f1.has_value());
    CHECK(*sm.f1 == doctest::Approx(1.0));
  }
  SUBCASE("null MAP against a 5-variable truth scores 0") {
    SelectionMetrics sm = selection_metrics(model_with({}), model_with({1, 2, 3, 4, 5}));
    CHECK(!sm.exact_match);
    REQUIRE(sm.f1.has_value());
    CHECK(*sm.f1 == doctest::Approx(0.0));
  }
  SUBCASE("superset MAP: precision 1/2, recall 1, F1 = 2/3") {
    SelectionMetrics sm = selection_metrics(model_with({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}),
                                            model_with({1, 2, 3, 4, 5}));
    REQUIRE(sm.f1.has_value());
    CHECK(*sm.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(sm.size == 10);
  }
  SUBCASE("F1 is missing when the truth is null") {
    SelectionMetrics sm = selection_metrics(model_with({1}), model_with({}));
    CHECK(!sm.f1.has_value());
  }
}

TEST_CASE("amse") {
  Vector est(2), tru(2);
  est << 0.0, 0.0;
  tru << 1.0, -1.0;
  CHECK(amse(est, tru, 2) == doctest::Approx(1.0));
  CHECK(amse(tru, tru, 2) == doctest::Approx(0.0));
  // Dense (p+1) vectors: the intercept must not contribute.
  Vector dense_est(3), dense_tru(3);
  dense_est << 99.0, 0.0, 0.0;
  dense_tru << -99.0, 1.0, -1.0;
  CHECK(amse(dense_est, dense_tru, 2) == doctest::Approx(1.0));
}

TEST_CASE("predict_bma: single zero draw gives 1/2 everywhere") {
  DrawStore ds = single_model_store(2, {0, 0}, Vector::Zero(3), 1);
  Matrix Xn(3, 3);
  Xn << 1, 0.5, -2, 1, 0, 0, 1, 3, 3;
  Vector phat = predict_bma(ds, Xn);
  for (int i = 0; i < 3; ++i) CHECK(phat[i] == doctest::Approx(0.5));
}

TEST_CASE("predict_bma: monotone in a covariate with all-positive coefficients") {
  RngStream rng(63, 0);
  DrawStore ds;
  ds.p = 1;
  ModelIndicator m = ModelIndicator::from_bits(1, {1});
  for (int t = 0; t < 100; ++t) {
    Vector active(2);
    active << rng.normal(), 0.5 + rng.uniform();  // positive slope
    ds.append_record(m, 1.0, active);
  }
  Matrix Xn(2, 2);
  Xn << 1, 0.0, 1, 1.0;
  Vector phat = predict_bma(ds, Xn);
  CHECK(phat[1] > phat[0]);
}

TEST_CASE("predict_bma matches a two-pass reference sum") {
  RngStream rng(64, 0);
  DrawStore ds;
  ds.p = 2;
  ModelIndicator m = ModelIndicator::from_bits(2, {1, 1});
  for (int t = 0; t < 500; ++t) {
    Vector active(3);
    active << rng.normal(), rng.normal(), rng.normal();
    ds.append_record(m, 1.0, active);
  }
  Matrix Xn(4, 3);
  Xn << 1, 0.2, -0.7, 1, -1.5, 0.4, 1, 2.2, 1.1, 1, 0, 0;
  Vector phat = predict_bma(ds, Xn);
  for (int i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (long t = 0; t < ds.size(); ++t) {
      double eta = 0.0;
      for (int j = 0; j <= 2; ++j) eta += Xn(i, j) * ds.beta[t * 3 + j];
      acc += 1.0 / (1.0 + std::exp(-eta));
    }
    CHECK(phat[i] == doctest::Approx(acc / ds.size()).epsilon(1e-12));
  }
}

TEST_CASE("prediction_metrics: perfect ranking gives AUC 1") {
  BinaryVector y(6);
  y << 0, 0, 0, 1, 1, 1;
  Vector phat(6);
  phat << 0.1, 0.2, 0.3, 0.7, 0.8, 0.9;
  PredictionMetrics pm = prediction_metrics(y, phat);
  REQUIRE(pm.auc.has_value());
  CHECK(*pm.auc == doctest::Approx(1.0));
}

TEST_CASE("prediction_metrics: constant mean prediction") {
  BinaryVector y(10);
  y << 1, 0, 1, 0, 1, 0, 1, 0, 1, 1;  // mean 0.6
  Vector phat = Vector::Constant(10, 0.6);
  PredictionMetrics pm = prediction_metrics(y, phat);
  CHECK(pm.brier == doctest::Approx(0.6 * 0.4));
  const double entropy = -(0.6 * std::log(0.6) + 0.4 * std::log(0.4));
  CHECK(pm.ls == doctest::Approx(entropy));
}

TEST_CASE("prediction_metrics: AUC matches the O(n^2) pairwise count") {
  RngStream rng(65, 0);
  const int n = 50;
  BinaryVector y(n);
  Vector phat(n);
  for (int i = 0; i < n; ++i) {
    y[i] = rng.uniform() < 0.4;
    phat[i] = rng.uniform();
  }
  if (y.sum() == 0) y[0] = 1;
  if (y.sum() == n) y[0] = 0;
  PredictionMetrics pm = prediction_metrics(y, phat);
  double wins = 0.0;
  long pairs = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (y[i] == 1 && y[j] == 0) {
        ++pairs;
        if (phat[i] > phat[j])
          wins += 1.0;
        else if (phat[i] == phat[j])
          wins += 0.5;
      }
  REQUIRE(pm.auc.has_value());
  CHECK(*pm.auc == doctest::Approx(wins / pairs).epsilon(1e-12));
}

TEST_CASE("prediction_metrics: degenerate labels report missing AUC/CS") {
  BinaryVector y = BinaryVector::Ones(5);
  Vector phat = Vector::Constant(5, 0.7);
  PredictionMetrics pm = prediction_metrics(y, phat);
  CHECK(!pm.auc.has_value());
  CHECK(!pm.cs.has_value());
}

TEST_CASE("prediction_metrics: calibration slope near 1 for calibrated inputs") {
  RngStream rng(66, 0);
  const int n = 4000;
  BinaryVector y(n);
  Vector phat(n);
  for (int i = 0; i < n; ++i) {
    const double eta = 2.0 * rng.normal();
    const double pi = 1.0 / (1.0 + std::exp(-eta));
    phat[i] = pi;
    y[i] = rng.uniform() < pi;
  }
  PredictionMetrics pm = prediction_metrics(y, phat);
  REQUIRE(pm.cs.has_value());
  CHECK(*pm.cs == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("summarize rejects an empty store") {
  DrawStore ds;
  ds.p = 2;
  CHECK_THROWS_AS(summarize(ds), ArgumentError);
}
