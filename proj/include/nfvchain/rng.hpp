#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace nfvchain {

// Seeded stream keyed by a tuple of integers, so that every entity of a
// scenario (a server, a link, a user's price table) owns an independent
// stream.  Distribution transforms are written out here rather than taken
// from <random> because the standard distributions are implementation-defined.
class Rng {
 public:
  Rng(std::initializer_list<std::uint64_t> key) : engine_(make_seed(key)) {}
  explicit Rng(std::span<const std::uint64_t> key) : engine_(make_seed(key)) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const auto span = static_cast<double>(hi - lo + 1);
    const int v = lo + static_cast<int>(std::floor(uniform() * span));
    return v > hi ? hi : v;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double rayleigh(double scale) { return scale * std::sqrt(-2.0 * std::log1p(-uniform())); }

  // Index drawn with probability proportional to weights.
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("categorical: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("categorical: zero total weight");
    const double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      acc += weights[k];
      if (u < acc) return k;
    }
    for (std::size_t k = weights.size(); k-- > 0;)
      if (weights[k] > 0.0) return k;
    return 0;
  }

 private:
  template <typename Range>
  static std::mt19937_64 make_seed(const Range& key) {
    std::vector<std::uint32_t> words;
    for (std::uint64_t k : key) {
      words.push_back(static_cast<std::uint32_t>(k));
      words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
  }

  std::mt19937_64 engine_;
};

}  // namespace nfvchain
