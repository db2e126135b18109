#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace boolmark {

// All randomness flows through this wrapper so runs are reproducible from a
// single seed and parallel workers can get decorrelated streams.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // splitmix64 of (base, stream); used to derive per-chain / per-restart /
  // per-repetition seeds from one base seed.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }

  std::size_t uniform_below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng: empty range");
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
  }

  bool bernoulli(double prob) { return uniform01() < prob; }

  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(eng_);
  }

  double beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("Rng: beta shapes");
    double x = gamma(a), y = gamma(b);
    while (x + y <= 0.0) {  // underflow guard for tiny shapes
      x = gamma(a);
      y = gamma(b);
    }
    return x / (x + y);
  }

  // Index drawn proportional to non-negative weights.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("Rng: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("Rng: weights sum to zero");
    double u = uniform01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

  std::uint64_t raw() { return eng_(); }

  std::mt19937_64& engine() { return eng_; }

private:
  std::mt19937_64 eng_;
};

}  // namespace boolmark
