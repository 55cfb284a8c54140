#ifndef LPEP_RNG_HPP_
#define LPEP_RNG_HPP_

#include <cstdint>
#include <cmath>

namespace lpep {

// Counter-based uniform random stream. Every output is a pure function of
// (seed, stream id, counter), so identical seeds reproduce identical draw
// sequences bit-for-bit on any platform, and streams never share state.
//
// The integer core is the SplitMix64 output function (Steele, Lea & Flood,
// "Fast splittable pseudorandom number generators") applied to
// key + counter * golden gamma.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_(derive_key(seed, stream_id)), counter_(0), have_spare_(false), spare_(0.0) {}

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (counter_++) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); never returns 0 (safe for log()).
  double uniform_pos() {
    double u;
    do { u = uniform(); } while (u <= 0.0);
    return u;
  }

  // Uniform integer in {0, 1, ..., n-1} by rejection (exactly uniform).
  std::uint64_t uniform_int(std::uint64_t n) {
    std::uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    std::uint64_t r;
    do { r = next_u64(); } while (r < threshold);
    return r % n;
  }

  // Standard normal via Box-Muller; the spare keeps draw order deterministic.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double exponential() { return -std::log(uniform_pos()); }

  bool bernoulli(double p) { return uniform() < p; }

  // Index draw from an unnormalized weight table (small tables only).
  int categorical(const double* w, int k) {
    double total = 0.0;
    for (int i = 0; i < k; ++i) total += w[i];
    double u = uniform() * total;
    double acc = 0.0;
    for (int i = 0; i < k; ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return k - 1;
  }

 private:
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
    auto mix = [](std::uint64_t z) {
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      return z ^ (z >> 31);
    };
    std::uint64_t k = mix(seed + 0x9E3779B97F4A7C15ULL);
    return mix(k ^ (stream_id * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
  }

  std::uint64_t key_;
  std::uint64_t counter_;
  bool have_spare_;
  double spare_;
};

}  // namespace lpep

#endif  // LPEP_RNG_HPP_
