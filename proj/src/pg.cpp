#include "lpep/pg.hpp"

#include <cassert>
#include <cmath>

#include "lpep/errors.hpp"

namespace lpep {

namespace {

constexpr double kTrunc = 0.64;  // intersection point of the two series bounds
constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxAcceptLoops = 1000;

// log Phi(x) with an asymptotic branch so that exp(2z + log Phi(-a)) stays
// accurate for large a where erfc underflows.
double log_norm_cdf(double x) {
  if (x > -10.0) return std::log(0.5 * std::erfc(-x * 0.70710678118654752440));
  const double x2 = x * x;
  // Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4) for x -> -inf
  return -0.5 * x2 - 0.5 * std::log(2.0 * kPi) - std::log(-x) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Piecewise coefficients a_n(x) of the alternating series for the tilted
// Jacobi-theta density (left: x <= t, right: x > t).
double a_coef(int n, double x, double t) {
  const double nph = n + 0.5;
  if (x <= t) {
    return kPi * nph * std::pow(2.0 / (kPi * x), 1.5) *
           std::exp(-2.0 * nph * nph / x);
  }
  return kPi * nph * std::exp(-0.5 * nph * nph * kPi * kPi * x);
}

// Inverse-Gaussian(mu, 1) restricted to (0, t); Windle's two-regime sampler.
double rtigauss(double z, double t, RngStream& rng) {
  double x = t + 1.0;
  if (1.0 / t > z) {  // mu = 1/z > t: rejection from the tilted chi-based proposal
    double alpha = 0.0;
    while (rng.uniform() > alpha) {
      double e1 = rng.exponential();
      double e2 = rng.exponential();
      while (e1 * e1 > 2.0 * e2 / t) {
        e1 = rng.exponential();
        e2 = rng.exponential();
      }
      x = t / ((1.0 + t * e1) * (1.0 + t * e1));
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {  // plain inverse-Gaussian draws until one lands in (0, t]
    const double mu = 1.0 / z;
    for (;;) {
      const double nrm = rng.normal();
      const double y = nrm * nrm;
      const double muy = mu * y;
      x = mu + 0.5 * mu * muy - 0.5 * mu * std::sqrt(4.0 * muy + muy * muy);
      if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
      if (x > 0.0 && x <= t) break;
    }
  }
  return x;
}

}  // namespace

double sample_pg1(double c, RngStream& rng) {
  if (!std::isfinite(c)) throw ArgumentError("sample_pg1: c must be finite");
  // PG(1, c) = J*(1, c/2) / 4 and the law depends on c only through |c|.
  const double z = 0.5 * std::fabs(c);
  const double t = kTrunc;

  const double k = kPi * kPi / 8.0 + z * z / 2.0;
  const double w = std::sqrt(kPi / 2.0);
  const double log_a = std::log(4.0) - std::log(kPi) - z;
  // Mass of the proposal to the right (truncated exponential) relative to the
  // left (truncated inverse-Gaussian).
  const double logf1 = log_a + log_norm_cdf(w * (t * z - 1.0)) + std::log(k) + k * t;
  const double logf2 = log_a + 2.0 * z + log_norm_cdf(-w * (t * z + 1.0)) + std::log(k) + k * t;
  const double p_over_q = std::exp(logf1) + std::exp(logf2);
  const double ratio = 1.0 / (1.0 + p_over_q);

  for (int loop = 0; loop < kMaxAcceptLoops; ++loop) {
    double x;
    if (rng.uniform() < ratio) {
      x = t + rng.exponential() / k;  // right piece
    } else {
      x = rtigauss(z, t, rng);  // left piece
    }
    // Squeeze via partial sums S_n of the alternating series.
    double s = a_coef(0, x, t);
    double u = rng.uniform() * s;
    int n = 0;
    while (true) {
      ++n;
      if (n % 2 == 1) {
        s -= a_coef(n, x, t);
        if (u <= s) return 0.25 * x;
      } else {
        s += a_coef(n, x, t);
        if (u > s) break;
      }
    }
  }
  throw NumericError("sample_pg1: accept/reject loop failed to terminate");
}

double pg1_mean(double c) {
  const double x = 0.5 * c;
  if (std::fabs(c) < 1e-4) {
    // tanh(x)/x = 1 - x^2/3 + 2 x^4/15 + O(x^6)
    const double x2 = x * x;
    return 0.25 * (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0);
  }
  return std::tanh(x) / (2.0 * c);
}

}  // namespace lpep
