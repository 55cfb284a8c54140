#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "lpep/pg.hpp"
#include "lpep/sampler.hpp"
#include "test_support.hpp"

using namespace lpep;
using lpep::testing::random_instance;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

McmcConfig fixed_config(int n, std::uint64_t seed = 1) {
  McmcConfig c;
  c.seed = seed;
  c.delta_prior = DeltaPrior{DeltaPriorKind::FixedUnitInfo, n};
  return c;
}

// Dense n x n evaluation of log f(gamma) f(delta|gamma) phi_n(z; m_z, V_z).
double dense_logpost(const Dataset& data, const Vector& omega, const ModelIndicator& model,
                     double delta, const GlmFit& fit, const DeltaPrior& dp,
                     const ModelPrior& mp) {
  const int n = data.n();
  const Matrix Xg = design_submatrix(data.X, model);
  const Matrix Vz = Matrix(omega.cwiseInverse().asDiagonal()) +
                    delta * Xg * fit.info.llt().solve(Xg.transpose());
  Vector z(n);
  for (int i = 0; i < n; ++i) z[i] = (data.y[i] - 0.5) / omega[i];
  const Vector diff = z - Xg * fit.beta_hat;
  Eigen::LLT<Matrix> llt(Vz);
  REQUIRE(llt.info() == Eigen::Success);
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  const double quad = diff.dot(llt.solve(diff));
  double lp = model_log_prior(mp, model, data.p()) - 0.5 * n * kLog2Pi - 0.5 * logdet -
              0.5 * quad;
  if (!dp.is_fixed()) lp += delta_log_prior(dp, delta, model);
  return lp;
}

ImaginarySample admissible_sample(const Dataset& data, std::uint64_t seed) {
  RngStream rng(seed, 0xA11);
  BinaryVector ys(data.n());
  for (;;) {
    for (int i = 0; i < data.n(); ++i) ys[i] = rng.uniform() < 0.5;
    ImaginarySample s = make_imaginary_sample(ys, data);
    if (s.admissible) return s;
  }
}

}  // namespace

TEST_CASE("Woodbury marginal log-posterior equals the dense evaluation") {
  RngStream rng(40, 0);
  int done = 0;
  for (int rep = 0; rep < 80 && done < 50; ++rep) {
    const int n = 6 + static_cast<int>(rng.uniform_int(7));  // n <= 12
    const int p = 1 + static_cast<int>(rng.uniform_int(3));
    Dataset d = random_instance(n, p, 4000 + rep);
    ModelIndicator m = ModelIndicator::null_model(p);
    for (int j = 1; j <= p; ++j)
      if (rng.uniform() < 0.5) m.set(j, true);

    ImaginarySample ys = make_imaginary_sample(d.y, d);
    if (!ys.admissible) continue;
    GlmFit fit = fit_mle(design_submatrix(d.X, m), ys.ystar);
    if (!fit.converged) continue;

    Vector omega(n);
    for (int i = 0; i < n; ++i) omega[i] = 0.05 + rng.uniform();
    const double delta = 0.5 + 30.0 * rng.uniform();

    DeltaPrior dp{DeltaPriorKind::HyperGOverN, n};
    ModelPrior mp;
    const double fast = marginal_logpost_gamma_delta(d, omega, m, delta, fit, dp, mp);
    const double dense = dense_logpost(d, omega, m, delta, fit, dp, mp);
    CHECK(fast == doctest::Approx(dense).epsilon(0).scale(1.0));
    CHECK(std::abs(fast - dense) < 1e-8);
    ++done;
  }
  CHECK(done == 50);
}

TEST_CASE("marginal log-posterior approaches the delta -> 0 limit") {
  Dataset d = random_instance(10, 2, 90);
  ModelIndicator m = ModelIndicator::full_model(2);
  ImaginarySample ys = admissible_sample(d, 3);
  GlmFit fit = fit_mle(design_submatrix(d.X, m), ys.ystar);
  RngStream rng(41, 0);
  Vector omega(d.n());
  for (int i = 0; i < d.n(); ++i) omega[i] = 0.2 + rng.uniform();

  // Reference: z ~ N(Xg bhat, Omega^-1) exactly.
  const Matrix Xg = design_submatrix(d.X, m);
  Vector z(d.n());
  for (int i = 0; i < d.n(); ++i) z[i] = (d.y[i] - 0.5) / omega[i];
  const Vector diff = z - Xg * fit.beta_hat;
  double ref = -0.5 * d.n() * kLog2Pi;
  for (int i = 0; i < d.n(); ++i)
    ref += 0.5 * std::log(omega[i]) - 0.5 * omega[i] * diff[i] * diff[i];
  ref += model_log_prior(ModelPrior{}, m, d.p());

  DeltaPrior dp{DeltaPriorKind::FixedUnitInfo, d.n()};
  const double at_tiny =
      marginal_logpost_gamma_delta(d, omega, m, 1e-12, fit, dp, ModelPrior{});
  CHECK(std::abs(at_tiny - ref) < 1e-4);
}

TEST_CASE("Omega z = y - 1/2 identity") {
  RngStream rng(42, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 5 + static_cast<int>(rng.uniform_int(40));
    Vector omega(n), kappa(n);
    for (int i = 0; i < n; ++i) {
      omega[i] = 0.01 + 3.0 * rng.uniform();
      kappa[i] = rng.uniform() < 0.5 ? -0.5 : 0.5;
    }
    // The sampler substitutes kappa for Omega z analytically, which is exact.
    // Forming z = kappa / omega numerically and multiplying back stays within
    // one rounding of kappa.
    for (int i = 0; i < n; ++i) {
      const double z = kappa[i] / omega[i];
      CHECK(std::abs(omega[i] * z - kappa[i]) <= 2.0 * 1e-16 * std::abs(kappa[i]));
    }
    // With dyadic omega the round trip is bit-exact.
    for (int i = 0; i < n; ++i) {
      const double w = std::ldexp(1.0, static_cast<int>(rng.uniform_int(8)) - 4);
      const double z = kappa[i] / w;
      CHECK(w * z == kappa[i]);
    }
  }
}

TEST_CASE("propose_model: p = 1 degrades swap moves to single flips") {
  McmcConfig cfg = fixed_config(10);
  ModelIndicator m = ModelIndicator::null_model(1);
  RngStream rng(50, 0);
  for (int rep = 0; rep < 2000; ++rep) {
    ModelProposal prop = propose_model(m, 1, cfg, rng);
    CHECK(prop.proposed.p_gamma() == 1);  // only one flip is possible
    CHECK(prop.proposed != m);
  }
}

TEST_CASE("propose_model never returns the current model") {
  McmcConfig cfg = fixed_config(10);
  RngStream rng(51, 0);
  ModelIndicator m = ModelIndicator::null_model(6);
  m.set(2, true);
  m.set(5, true);
  for (int rep = 0; rep < 20000; ++rep) {
    ModelProposal prop = propose_model(m, 6, cfg, rng);
    CHECK(prop.proposed != m);
  }
}

TEST_CASE("propose_model: empirical frequencies match q and interior symmetry holds") {
  McmcConfig cfg = fixed_config(10);
  const int p = 6;
  ModelIndicator a = ModelIndicator::null_model(p);
  a.set(1, true);
  a.set(4, true);  // interior: 2 of 6 included
  ModelIndicator b = a;
  b.set(2, true);  // one-flip neighbor, also interior

  // Interior kernel symmetry is exact.
  CHECK(model_proposal_logq(a, b, cfg) == doctest::Approx(model_proposal_logq(b, a, cfg)));

  // Empirical frequency of a->b against the closed form, 10^6 proposals.
  RngStream rng(52, 0);
  const int trials = 1000000;
  int hits_ab = 0;
  for (int t = 0; t < trials; ++t)
    if (propose_model(a, p, cfg, rng).proposed == b) ++hits_ab;
  const double q_ab = std::exp(model_proposal_logq(a, b, cfg));
  const double se = std::sqrt(q_ab * (1.0 - q_ab) / trials);
  CHECK(std::abs(hits_ab / double(trials) - q_ab) < 3.0 * se);

  int hits_ba = 0;
  RngStream rng2(53, 0);
  for (int t = 0; t < trials; ++t)
    if (propose_model(b, p, cfg, rng2).proposed == a) ++hits_ba;
  const double diff = (hits_ab - hits_ba) / double(trials);
  CHECK(std::abs(diff) < 3.0 * std::sqrt(2.0 * q_ab * (1.0 - q_ab) / trials));
}

TEST_CASE("propose_model: boundary states carry the exact Hastings correction") {
  McmcConfig cfg = fixed_config(10);
  const int p = 3;
  ModelIndicator full = ModelIndicator::full_model(p);
  ModelIndicator drop1 = full;
  drop1.set(1, false);
  // Swap is impossible from the full model, so its type-2 mass degrades to
  // flips and the kernel is asymmetric across this pair.
  const double fwd = std::exp(model_proposal_logq(full, drop1, cfg));
  const double rev = std::exp(model_proposal_logq(drop1, full, cfg));
  CHECK(fwd > rev);  // 1.0 vs 0.9 of the flip mass
  CHECK(fwd / rev == doctest::Approx(1.0 / 0.9).epsilon(1e-12));
}

TEST_CASE("reflective_normal_logpdf closed forms") {
  // Boundary doubling at a = 0, dcur = dprop = 0, tau = 1.
  const double v = reflective_normal_logpdf(0.0, 0.0, 0.0, 1.0);
  CHECK(std::exp(v) == doctest::Approx(2.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  CHECK(std::exp(v) == doctest::Approx(0.797885).epsilon(1e-5));

  // Symmetry in (dprop, dcur) for a fixed boundary.
  for (double dp : {0.5, 1.0, 7.0})
    for (double dc : {0.25, 2.0, 9.0})
      CHECK(reflective_normal_logpdf(dp, dc, 0.0, 2.0) ==
            doctest::Approx(reflective_normal_logpdf(dc, dp, 0.0, 2.0)));

  CHECK_THROWS_AS(reflective_normal_logpdf(-0.1, 1.0, 0.0, 1.0), ArgumentError);
}

TEST_CASE("reflective density integrates to 1") {
  const double a = 4.5, mean = 10.0, tau = 10.5;
  const int pts = 400001;
  const double hi = mean + 60.0 * tau;
  double acc = 0.0;
  for (int i = 0; i < pts; ++i) {
    const double x = a + (hi - a) * i / (pts - 1.0);
    const double f = std::exp(reflective_normal_logpdf(x, mean, a, tau));
    acc += f * (i == 0 || i == pts - 1 ? 0.5 : 1.0);
  }
  acc *= (hi - a) / (pts - 1.0);
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("step_omega refreshes every coordinate with PG draws") {
  Dataset d = random_instance(40, 2, 700);
  McmcConfig cfg = fixed_config(d.n());
  RngStream rng(3, 9);
  McmcState st = initial_state(d, cfg, rng);
  const Vector before = st.omega;
  step_omega(st, d, rng);
  for (int i = 0; i < d.n(); ++i) {
    CHECK(st.omega[i] > 0.0);
    CHECK(st.omega[i] != before[i]);
  }
}

TEST_CASE("step_omega at beta = 0 draws PG(1,0) variates") {
  Dataset d = random_instance(10000, 1, 701);
  McmcConfig cfg = fixed_config(d.n());
  RngStream rng(4, 9);
  McmcState st = initial_state(d, cfg, rng);
  st.beta.setZero();
  step_omega(st, d, rng);
  const double mean = st.omega.mean();
  double var = 0.0;
  for (int i = 0; i < d.n(); ++i) var += (st.omega[i] - mean) * (st.omega[i] - mean);
  var /= d.n();
  CHECK(std::abs(mean - 0.25) < 3.0 * std::sqrt(var / d.n()));
}

TEST_CASE("step_omega reproduces the pg module stream bit for bit") {
  Dataset d = random_instance(50, 1, 702);
  McmcConfig cfg = fixed_config(d.n());
  RngStream rng_state(5, 9);
  McmcState st = initial_state(d, cfg, rng_state);

  RngStream rng_a(123, 77), rng_b(123, 77);
  step_omega(st, d, rng_a);
  const Matrix Xg = design_submatrix(d.X, st.model);
  const Vector eta = Xg * st.beta;
  for (int i = 0; i < d.n(); ++i) CHECK(st.omega[i] == sample_pg1(eta[i], rng_b));
}

TEST_CASE("step_delta_extra: no-op under FixedUnitInfo") {
  Dataset d = random_instance(20, 2, 800);
  McmcConfig cfg = fixed_config(d.n());
  RngStream rng(6, 9);
  McmcState st = initial_state(d, cfg, rng);
  const McmcState before = st;
  DrawStore::Counters counters;
  step_delta_extra(st, d, cfg, rng, counters);
  CHECK(st.delta == before.delta);
  CHECK(counters.delta_extra_proposed == 0);
}

TEST_CASE("step_delta_extra holds the 1-D quadrature target (KS < 0.03)") {
  // q = 1 toy: null model, fixed (gamma, y*, beta); the delta chain must have
  // stationary density proportional to phi(beta; bhat, delta/H) f(delta).
  Dataset d = random_instance(20, 1, 801);
  McmcConfig cfg;
  cfg.seed = 5;
  cfg.delta_prior = DeltaPrior{DeltaPriorKind::HyperGOverN, d.n()};
  RngStream rng(7, 9);
  McmcState st = initial_state(d, cfg, rng);
  st.beta = st.fit_star.beta_hat.array() + 1.1;  // fixed beta off the mode
  DrawStore::Counters counters;

  const int iters = 100000;
  std::vector<double> draws;
  draws.reserve(iters);
  for (int t = 0; t < iters; ++t) {
    step_delta_extra(st, d, cfg, rng, counters);
    draws.push_back(st.delta);
  }

  // Target CDF on a fine grid by trapezoid quadrature.
  auto target_logpdf = [&](double delta) {
    return lpep_conditional_logpdf(st.beta, st.fit_star, delta) +
           delta_log_prior(cfg.delta_prior, delta, st.model);
  };
  const int grid_n = 200000;
  const double lo = 1e-8, hi = 5e6;
  std::vector<double> xs(grid_n), cdf(grid_n);
  double acc = 0.0, prev_x = lo, prev_f = std::exp(target_logpdf(lo));
  for (int i = 0; i < grid_n; ++i) {
    const double x = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (grid_n - 1.0));
    const double f = std::exp(target_logpdf(x));
    if (i > 0) acc += 0.5 * (f + prev_f) * (x - prev_x);
    xs[i] = x;
    cdf[i] = acc;
    prev_x = x;
    prev_f = f;
  }
  for (int i = 0; i < grid_n; ++i) cdf[i] /= acc;

  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  std::size_t gi = 0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    while (gi + 1 < xs.size() && xs[gi + 1] < draws[i]) ++gi;
    const double emp = (i + 1.0) / draws.size();
    ks = std::max(ks, std::abs(emp - cdf[gi]));
  }
  CHECK(ks < 0.03);
  CHECK(counters.delta_extra_proposed == iters);
  CHECK(counters.delta_extra_accepted > 0);
}

TEST_CASE("run_chain is byte-identical under the same seed") {
  Dataset d = random_instance(15, 2, 900);
  McmcConfig cfg = fixed_config(d.n(), 77);
  cfg.iterations = 600;
  cfg.burn_in = 100;
  DrawStore a = run_chain(d, cfg, 0);
  DrawStore b = run_chain(d, cfg, 0);
  REQUIRE(a.size() == b.size());
  CHECK(a.beta == b.beta);
  CHECK(a.delta == b.delta);
  for (long t = 0; t < a.size(); ++t) {
    CHECK(a.gamma[t].w0 == b.gamma[t].w0);
    CHECK(a.gamma[t].w1 == b.gamma[t].w1);
  }
}

TEST_CASE("run_chain: FixedUnitInfo keeps delta pinned at n*") {
  Dataset d = random_instance(15, 2, 901);
  McmcConfig cfg = fixed_config(d.n(), 3);
  cfg.iterations = 500;
  cfg.burn_in = 50;
  DrawStore ds = run_chain(d, cfg, 0);
  for (long t = 0; t < ds.size(); ++t) CHECK(ds.delta[t] == double(d.n()));
}

TEST_CASE("run_chain: robust prior keeps delta above the moving support bound") {
  Dataset d = random_instance(25, 2, 902);
  McmcConfig cfg;
  cfg.seed = 11;
  cfg.iterations = 2000;
  cfg.burn_in = 200;
  cfg.delta_prior = DeltaPrior{DeltaPriorKind::Robust, d.n()};
  DrawStore ds = run_chain(d, cfg, 0);
  for (long t = 0; t < ds.size(); ++t) {
    const int pg = __builtin_popcountll(ds.gamma[t].w0);
    const double bound = (d.n() - pg) / (pg + 1.0);
    CHECK(ds.delta[t] > bound);
  }
}

TEST_CASE("record layout: nonzero pattern matches gamma, count matches config") {
  Dataset d = random_instance(15, 3, 903);
  McmcConfig cfg = fixed_config(d.n(), 5);
  cfg.iterations = 400;
  cfg.burn_in = 150;
  DrawStore ds = run_chain(d, cfg, 0);
  CHECK(ds.size() == 250);
  for (long t = 0; t < ds.size(); ++t) {
    for (int j = 1; j <= d.p(); ++j) {
      const bool on = (ds.gamma[t].w0 >> (j - 1)) & 1;
      const double bj = ds.beta[t * (d.p() + 1) + j];
      if (!on) CHECK(bj == 0.0);
    }
  }
}
