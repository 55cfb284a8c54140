#include "lpep/sampler.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>
#include <utility>

#include "lpep/pg.hpp"
#include "lpep/separation.hpp"

namespace lpep {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

double hash_binary(const BinaryVector& v) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    h ^= static_cast<std::uint64_t>(v[i] + 1);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// LRU memo of GlmFits within one chain, keyed by
// (dataset fingerprint, gamma mask, 64-bit y* hash).
class FitCache {
 public:
  explicit FitCache(std::size_t capacity = 64) : capacity_(capacity) {}

  const GlmFit* find(std::uint64_t ds, const ModelIndicator::Key& gk, std::uint64_t yh) {
    auto it = map_.find({ds, gk, yh});
    if (it == map_.end()) return nullptr;
    order_.splice(order_.begin(), order_, it->second);
    return &it->second->second;
  }

  void insert(std::uint64_t ds, const ModelIndicator::Key& gk, std::uint64_t yh, GlmFit fit) {
    Key key{ds, gk, yh};
    order_.emplace_front(key, std::move(fit));
    map_[key] = order_.begin();
    if (map_.size() > capacity_) {
      map_.erase(order_.back().first);
      order_.pop_back();
    }
  }

 private:
  struct Key {
    std::uint64_t ds;
    ModelIndicator::Key g;
    std::uint64_t y;
    bool operator==(const Key& o) const { return ds == o.ds && g == o.g && y == o.y; }
  };
  struct Hash {
    std::size_t operator()(const Key& k) const {
      return KeyHash{}(k.g) ^ (k.y * 0x9E3779B97F4A7C15ULL) ^ (k.ds + 0x165667B19E3779F9ULL);
    }
  };
  std::size_t capacity_;
  std::list<std::pair<Key, GlmFit>> order_;
  std::unordered_map<Key, typename std::list<std::pair<Key, GlmFit>>::iterator, Hash> map_;
};

thread_local FitCache g_fit_cache;

// Embed the current active-coordinate estimate into the proposal's coordinate
// system (shared coordinates copied, new ones start at zero).
Vector embed_warm_start(const ModelIndicator& from, const Vector& beta_from,
                        const ModelIndicator& to) {
  const auto cols_from = from.active_columns();
  const auto cols_to = to.active_columns();
  Vector out = Vector::Zero(cols_to.size());
  std::size_t a = 0;
  for (std::size_t b = 0; b < cols_to.size(); ++b) {
    while (a < cols_from.size() && cols_from[a] < cols_to[b]) ++a;
    if (a < cols_from.size() && cols_from[a] == cols_to[b]) out[b] = beta_from[a];
  }
  return out;
}

GlmFit fit_for(const Dataset& data, const ModelIndicator& model, const BinaryVector& ystar,
               const ModelIndicator& warm_model, const Vector& warm_beta) {
  const auto ds = data.fingerprint();
  const auto gk = model.key();
  const auto yh = hash_binary(ystar);
  if (const GlmFit* hit = g_fit_cache.find(ds, gk, yh)) return *hit;
  const Matrix Xg = design_submatrix(data.X, model);
  GlmFit fit = fit_mle(Xg, ystar, embed_warm_start(warm_model, warm_beta, model));
  g_fit_cache.insert(ds, gk, yh, fit);
  return fit;
}

double logsumexp2(double a, double b) {
  const double m = std::max(a, b);
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

int sample_flip_count(const double* probs, int len, int cap, RngStream& rng) {
  // Truncate and renormalize when fewer flips than the table are possible.
  const int k = std::min(len, cap);
  double w[8];
  for (int i = 0; i < k; ++i) w[i] = probs[i];
  return rng.categorical(w, k) + 1;
}

void flip_distinct(ModelIndicator& model, int p, int d, RngStream& rng) {
  int idx[4];
  for (int t = 0; t < d; ++t) {
    bool fresh = false;
    while (!fresh) {
      idx[t] = 1 + static_cast<int>(rng.uniform_int(p));
      fresh = true;
      for (int s = 0; s < t; ++s)
        if (idx[s] == idx[t]) fresh = false;
    }
    model.flip(idx[t]);
  }
}

BinaryVector balanced_candidate(int n, RngStream& rng) {
  BinaryVector y(n);
  const int ones = n / 2;
  for (int i = 0; i < n; ++i) y[i] = i < ones ? 1 : 0;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(i + 1));
    std::swap(y[i], y[j]);
  }
  return y;
}

}  // namespace

void McmcConfig::validate() const {
  auto check_simplex = [](const double* v, int k, const char* name) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      if (v[i] < 0.0) throw ConfigError(std::string(name) + ": negative probability");
      s += v[i];
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw ConfigError(std::string(name) + ": probabilities must sum to 1");
  };
  check_simplex(move_type_probs.data(), 2, "move_type_probs");
  check_simplex(flip_count_probs.data(), 4, "flip_count_probs");
  check_simplex(ystar_flip_probs.data(), 5, "ystar_flip_probs");
  if (ystar_local_prob < 0.0 || ystar_local_prob > 1.0)
    throw ConfigError("ystar_local_prob out of [0,1]");
  if (iterations <= burn_in || burn_in < 0)
    throw ConfigError("need iterations > burn_in >= 0");
  if (delta_prior.n_star < 1) throw ConfigError("delta prior n_star must be >= 1");
}

void McmcState::check_invariants(const Dataset& data, const McmcConfig& config) const {
  assert(delta > delta_support_lower(config.delta_prior, model) ||
         config.delta_prior.is_fixed());
  assert(ystar.admissible);
  assert((omega.array() > 0.0).all());
  assert(beta.size() == model.dim());
  (void)data;
  (void)config;
}

void DrawStore::append_record(const ModelIndicator& model, double dlt, const Vector& active_beta) {
  gamma.push_back(model.key());
  delta.push_back(dlt);
  const auto cols = model.active_columns();
  const std::size_t base = beta.size();
  beta.resize(base + p + 1, 0.0);
  for (std::size_t k = 0; k < cols.size(); ++k) beta[base + cols[k]] = active_beta[k];
}

DrawStore DrawStore::merge(const std::vector<DrawStore>& chains) {
  DrawStore out;
  if (chains.empty()) return out;
  out.p = chains.front().p;
  for (const auto& c : chains) {
    if (c.p != out.p) throw ArgumentError("DrawStore::merge: mixed dimensions");
    out.gamma.insert(out.gamma.end(), c.gamma.begin(), c.gamma.end());
    out.delta.insert(out.delta.end(), c.delta.begin(), c.delta.end());
    out.beta.insert(out.beta.end(), c.beta.begin(), c.beta.end());
    out.counters.iterations += c.counters.iterations;
    out.counters.model_delta_proposed += c.counters.model_delta_proposed;
    out.counters.model_delta_accepted += c.counters.model_delta_accepted;
    out.counters.ystar_local_proposed += c.counters.ystar_local_proposed;
    out.counters.ystar_local_accepted += c.counters.ystar_local_accepted;
    out.counters.ystar_global_proposed += c.counters.ystar_global_proposed;
    out.counters.ystar_global_accepted += c.counters.ystar_global_accepted;
    out.counters.ystar_inadmissible += c.counters.ystar_inadmissible;
    out.counters.delta_extra_proposed += c.counters.delta_extra_proposed;
    out.counters.delta_extra_accepted += c.counters.delta_extra_accepted;
    out.counters.numeric_failures += c.counters.numeric_failures;
  }
  return out;
}

double marginal_logpost_gamma_delta(const Dataset& data, const Vector& omega,
                                    const ModelIndicator& model, double delta,
                                    const GlmFit& fit_star, const DeltaPrior& dprior,
                                    const ModelPrior& mprior) {
  const int n = data.n();
  const int q = model.dim();
  if (omega.size() != n) throw ArgumentError("marginal_logpost: omega length mismatch");

  const double lp_model = model_log_prior(mprior, model, data.p());
  const double lp_delta = dprior.is_fixed() ? 0.0 : delta_log_prior(dprior, delta, model);
  if (lp_delta == kNegInf) return kNegInf;

  const Matrix Xg = design_submatrix(data.X, model);
  const Vector m_z = Xg * fit_star.beta_hat;

  // z_i = (y_i - 1/2)/omega_i
  Vector diff(n);
  for (int i = 0; i < n; ++i) diff[i] = (data.y[i] - 0.5) / omega[i] - m_z[i];

  // M = (1/delta) H + Xg' Omega Xg
  Matrix M = (Xg.transpose() * omega.asDiagonal() * Xg + fit_star.info / delta).eval();
  Eigen::LLT<Matrix> lltM(M);
  if (lltM.info() != Eigen::Success)
    throw NumericError("marginal_logpost: Cholesky of M failed");
  Eigen::LLT<Matrix> lltH(fit_star.info);
  if (lltH.info() != Eigen::Success)
    throw NumericError("marginal_logpost: Cholesky of H failed");

  double logdet_M = 0.0, logdet_H = 0.0, sum_log_omega = 0.0;
  for (int j = 0; j < q; ++j) {
    logdet_M += 2.0 * std::log(lltM.matrixL()(j, j));
    logdet_H += 2.0 * std::log(lltH.matrixL()(j, j));
  }
  for (int i = 0; i < n; ++i) sum_log_omega += std::log(omega[i]);

  // log|V_z| and (z-m)' V_z^-1 (z-m) via the Woodbury identities.
  const double logdet_V = q * std::log(delta) + logdet_M - logdet_H - sum_log_omega;
  const Vector u = Xg.transpose() * (omega.asDiagonal() * diff);
  const double quad = diff.dot(omega.asDiagonal() * diff) - u.dot(lltM.solve(u));

  const double log_phi = -0.5 * n * kLog2Pi - 0.5 * logdet_V - 0.5 * quad;
  return lp_model + lp_delta + log_phi;
}

double model_proposal_logq(const ModelIndicator& from, const ModelIndicator& to,
                           const McmcConfig& config) {
  const int p = from.p();
  int d = 0;
  for (int j = 1; j <= p; ++j) d += from.includes(j) != to.includes(j);
  if (d == 0) return kNegInf;

  const int dmax = std::min<int>(4, p);
  double trunc_norm = 0.0;
  for (int i = 0; i < dmax; ++i) trunc_norm += config.flip_count_probs[i];

  auto log_choose = [](int nn, int kk) {
    return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
  };

  double type1 = kNegInf;
  if (d <= dmax)
    type1 = std::log(config.move_type_probs[0] * config.flip_count_probs[d - 1] / trunc_norm) -
            log_choose(p, d);

  const int k = from.p_gamma();
  double type2 = kNegInf;
  if (k > 0 && k < p) {
    // Swap kernel: reaches exactly the equal-size models two flips away.
    if (d == 2 && to.p_gamma() == k)
      type2 = std::log(config.move_type_probs[1]) - std::log(double(k)) -
              std::log(double(p - k));
  } else if (d <= dmax) {
    // Swap impossible from the null/full model; the move degrades to type 1.
    type2 = std::log(config.move_type_probs[1] * config.flip_count_probs[d - 1] / trunc_norm) -
            log_choose(p, d);
  }
  return logsumexp2(type1, type2);
}

ModelProposal propose_model(const ModelIndicator& model, int p, const McmcConfig& config,
                            RngStream& rng) {
  if (p < 1) throw ArgumentError("propose_model: need p >= 1");
  ModelIndicator prop = model;
  const bool type2 = rng.uniform() >= config.move_type_probs[0];
  const int k = model.p_gamma();

  if (type2 && k > 0 && k < p) {
    int inc = static_cast<int>(rng.uniform_int(k));
    int exc = static_cast<int>(rng.uniform_int(p - k));
    for (int j = 1; j <= p; ++j) {
      if (model.includes(j) && inc-- == 0) prop.flip(j);
      if (!model.includes(j) && exc-- == 0) prop.flip(j);
    }
  } else {
    const int d = sample_flip_count(config.flip_count_probs.data(), 4, p, rng);
    flip_distinct(prop, p, d, rng);
  }

  ModelProposal out;
  out.proposed = prop;
  out.logq_forward = model_proposal_logq(model, prop, config);
  out.logq_reverse = model_proposal_logq(prop, model, config);
  return out;
}

double reflective_normal_logpdf(double dprop, double dcur, double a, double tau) {
  if (dprop < a) throw ArgumentError("reflective_normal_logpdf: point below boundary");
  if (!(tau > 0.0)) throw ArgumentError("reflective_normal_logpdf: scale must be positive");
  const double u = (dprop - dcur) / tau;
  const double v = (2.0 * a - dprop - dcur) / tau;
  return -std::log(tau) - 0.5 * kLog2Pi + logsumexp2(-0.5 * u * u, -0.5 * v * v);
}

namespace {

// Draw beta from its exact full conditional N(m_omega, M^{-1}) of Eq. (10).
Vector draw_beta_full_conditional(const Dataset& data, const ModelIndicator& model, double delta,
                                  const GlmFit& fit_star, const Vector& omega, RngStream& rng) {
  const int n = data.n();
  const Matrix Xg = design_submatrix(data.X, model);
  Vector kappa(n);
  for (int i = 0; i < n; ++i) kappa[i] = data.y[i] - 0.5;
  // Omega z = kappa exactly, so the mean uses Xg' kappa directly.
  const Matrix M = (Xg.transpose() * omega.asDiagonal() * Xg + fit_star.info / delta).eval();
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    throw NumericError("beta draw: Cholesky of the full-conditional precision failed");
  const Vector rhs = Xg.transpose() * kappa + (fit_star.info * fit_star.beta_hat) / delta;
  const Vector mean = llt.solve(rhs);
  Vector xi(mean.size());
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = rng.normal();
  return mean + llt.matrixU().solve(xi);
}

}  // namespace

int step_model_delta(McmcState& state, const Dataset& data, const McmcConfig& config,
                     RngStream& rng, DrawStore::Counters& counters) {
  const DeltaPrior& dp = config.delta_prior;
  const double tau = config.tau(data.n());

  ModelProposal mp = propose_model(state.model, data.p(), config, rng);
  const double a_prop = delta_support_lower(dp, mp.proposed);
  const double a_cur = delta_support_lower(dp, state.model);

  double delta_prop;
  if (dp.is_fixed()) {
    delta_prop = static_cast<double>(dp.n_star);
  } else {
    const double eps = state.delta + tau * rng.normal();
    delta_prop = a_prop + std::abs(eps - a_prop);
  }

  const GlmFit& fit_prop =
      fit_for(data, mp.proposed, state.ystar.ystar, state.model, state.fit_star.beta_hat);

  const double lp_prop =
      marginal_logpost_gamma_delta(data, state.omega, mp.proposed, delta_prop, fit_prop, dp,
                                   config.model_prior);
  const double lp_cur =
      marginal_logpost_gamma_delta(data, state.omega, state.model, state.delta, state.fit_star,
                                   dp, config.model_prior);

  double log_ratio = lp_prop - lp_cur + (mp.logq_reverse - mp.logq_forward);
  if (!dp.is_fixed())
    log_ratio += reflective_normal_logpdf(state.delta, delta_prop, a_cur, tau) -
                 reflective_normal_logpdf(delta_prop, state.delta, a_prop, tau);

  ++counters.model_delta_proposed;
  int accepted = 0;
  if (std::log(rng.uniform_pos()) <= log_ratio) {
    state.model = mp.proposed;
    state.delta = delta_prop;
    state.fit_star = fit_prop;
    accepted = 1;
    ++counters.model_delta_accepted;
  }

  // Gibbs refresh of beta from its exact full conditional, accept or reject.
  state.beta =
      draw_beta_full_conditional(data, state.model, state.delta, state.fit_star, state.omega, rng);
  return accepted;
}

void step_omega(McmcState& state, const Dataset& data, RngStream& rng) {
  const Matrix Xg = design_submatrix(data.X, state.model);
  const Vector eta = Xg * state.beta;
  for (int i = 0; i < data.n(); ++i) state.omega[i] = sample_pg1(eta[i], rng);
}

int step_ystar(McmcState& state, const Dataset& data, const McmcConfig& config, RngStream& rng,
               DrawStore::Counters& counters) {
  const int n = data.n();
  const bool local = rng.uniform() < config.ystar_local_prob;

  BinaryVector cand = state.ystar.ystar;
  Vector log_pi, log_1mpi;  // global-proposal log-probabilities

  if (local) {
    ++counters.ystar_local_proposed;
    const int d = sample_flip_count(config.ystar_flip_probs.data(), 5, n, rng);
    int idx[5];
    for (int t = 0; t < d; ++t) {
      bool fresh = false;
      while (!fresh) {
        idx[t] = static_cast<int>(rng.uniform_int(n));
        fresh = true;
        for (int s = 0; s < t; ++s)
          if (idx[s] == idx[t]) fresh = false;
      }
      cand[idx[t]] = 1 - cand[idx[t]];
    }
  } else {
    ++counters.ystar_global_proposed;
    // pi*_i = expit( beta_0 / n + x_{i,gamma_-1}' beta_{gamma_-1} / delta )
    const Matrix Xg = design_submatrix(data.X, state.model);
    Vector psi = Vector::Zero(n);
    if (state.model.p_gamma() > 0)
      psi = Xg.rightCols(state.model.p_gamma()) * state.beta.tail(state.model.p_gamma());
    const double b0 = state.beta[0];
    log_pi.resize(n);
    log_1mpi.resize(n);
    for (int i = 0; i < n; ++i) {
      const double s = b0 / n + psi[i] / state.delta;
      log_pi[i] = -log1p_exp(-s);
      log_1mpi[i] = -log1p_exp(s);
      cand[i] = rng.uniform() < std::exp(log_pi[i]) ? 1 : 0;
    }
  }

  ImaginarySample prop = make_imaginary_sample(cand, data);
  if (!prop.admissible) {
    ++counters.ystar_inadmissible;
    return 0;  // immediate rejection
  }

  const GlmFit& fit_prop = fit_for(data, state.model, prop.ystar, state.model,
                                   state.fit_star.beta_hat);

  double log_ratio = lpep_conditional_logpdf(state.beta, fit_prop, state.delta) +
                     imaginary_log_weight(prop, data) -
                     lpep_conditional_logpdf(state.beta, state.fit_star, state.delta) -
                     imaginary_log_weight(state.ystar, data);
  if (!local) {
    // Independence-sampler correction q(y*)/q(y*').
    double logq_cur = 0.0, logq_prop = 0.0;
    for (int i = 0; i < n; ++i) {
      logq_cur += state.ystar.ystar[i] ? log_pi[i] : log_1mpi[i];
      logq_prop += prop.ystar[i] ? log_pi[i] : log_1mpi[i];
    }
    log_ratio += logq_cur - logq_prop;
  }

  if (std::log(rng.uniform_pos()) <= log_ratio) {
    state.ystar = std::move(prop);
    state.fit_star = fit_prop;
    if (local)
      ++counters.ystar_local_accepted;
    else
      ++counters.ystar_global_accepted;
    return 1;
  }
  return 0;
}

int step_delta_extra(McmcState& state, const Dataset& data, const McmcConfig& config,
                     RngStream& rng, DrawStore::Counters& counters) {
  const DeltaPrior& dp = config.delta_prior;
  if (dp.is_fixed()) return 0;  // no-op, counter untouched

  const double tau = config.tau(data.n());
  const double a = delta_support_lower(dp, state.model);
  const double eps = state.delta + tau * rng.normal();
  const double delta_prop = a + std::abs(eps - a);

  const double log_ratio =
      lpep_conditional_logpdf(state.beta, state.fit_star, delta_prop) +
      delta_log_prior(dp, delta_prop, state.model) -
      lpep_conditional_logpdf(state.beta, state.fit_star, state.delta) -
      delta_log_prior(dp, state.delta, state.model) +
      reflective_normal_logpdf(state.delta, delta_prop, a, tau) -
      reflective_normal_logpdf(delta_prop, state.delta, a, tau);

  ++counters.delta_extra_proposed;
  if (std::log(rng.uniform_pos()) <= log_ratio) {
    state.delta = delta_prop;
    ++counters.delta_extra_accepted;
    return 1;
  }
  return 0;
}

McmcState initial_state(const Dataset& data, const McmcConfig& config, RngStream& rng) {
  const int n = data.n();
  McmcState st;
  st.model = ModelIndicator::null_model(data.p());

  ImaginarySample ys = make_imaginary_sample(data.y, data);
  if (!ys.admissible) {
    bool found = false;
    for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
      ys = make_imaginary_sample(balanced_candidate(n, rng), data);
      found = ys.admissible;
    }
    if (!found)
      throw ConfigError("initialization: design admits no balanced admissible y* found; supply one");
  }
  st.ystar = std::move(ys);

  st.delta = config.delta_prior.is_fixed()
                 ? static_cast<double>(config.delta_prior.n_star)
                 : delta_prior_sample(config.delta_prior, st.model, rng);

  st.fit_star = fit_mle(design_submatrix(data.X, st.model), st.ystar.ystar);

  // beta ~ N(beta_hat(y*), delta H^{-1})
  Eigen::LLT<Matrix> llt(st.fit_star.info);
  if (llt.info() != Eigen::Success)
    throw NumericError("initialization: information matrix not positive definite");
  Vector xi(st.model.dim());
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = rng.normal();
  st.beta = st.fit_star.beta_hat + std::sqrt(st.delta) * llt.matrixU().solve(xi);

  st.omega.resize(n);
  step_omega(st, data, rng);
  return st;
}

DrawStore run_chain(const Dataset& data, const McmcConfig& config, RngStream& rng) {
  config.validate();
  data.validate();

  McmcState state = initial_state(data, config, rng);

  DrawStore store;
  store.p = data.p();
  store.counters.iterations = config.iterations;
  const long retained = config.iterations - config.burn_in;
  store.gamma.reserve(retained);
  store.delta.reserve(retained);
  store.beta.reserve(static_cast<std::size_t>(retained) * (data.p() + 1));

  for (long t = 0; t < config.iterations; ++t) {
    McmcState backup = state;
    try {
      step_model_delta(state, data, config, rng, store.counters);
      step_omega(state, data, rng);
      step_ystar(state, data, config, rng, store.counters);
      step_delta_extra(state, data, config, rng, store.counters);
    } catch (const NumericError&) {
      state = std::move(backup);
      ++store.counters.numeric_failures;
    }
#ifndef NDEBUG
    state.check_invariants(data, config);
#endif
    if (t >= config.burn_in) store.append_record(state.model, state.delta, state.beta);
  }

  if (store.counters.numeric_failures * 1000 > config.iterations)
    throw NumericError("run_chain: more than 0.1% of iterations hit numeric failures (" +
                       std::to_string(store.counters.numeric_failures) + " of " +
                       std::to_string(config.iterations) + ")");
  return store;
}

DrawStore run_chain(const Dataset& data, const McmcConfig& config, std::uint64_t chain_index) {
  RngStream rng(config.seed, chain_index);
  return run_chain(data, config, rng);
}

}  // namespace lpep
