#pragma once

#include "bae/types.hpp"

#include <cstdint>
#include <random>

namespace bae {

/// Well-known stream ids. Every sampled object draws from its own
/// (seed, stream) pair so adding a consumer never perturbs the others.
enum class Stream : std::uint64_t {
  prior = 1,
  multiplicative = 2,
  additive = 3,
  validation_prior = 11,
  validation_multiplicative = 12,
  validation_additive = 13,
  posterior = 21,
};

/// Seedable generator for one (seed, stream-id) pair.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }
  RandomStream(std::uint64_t seed, Stream stream)
      : RandomStream(seed, static_cast<std::uint64_t>(stream)) {}

  std::mt19937_64 &engine() { return engine_; }

  double normal() { return normal_(engine_); }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v[i] = normal_(engine_);
    return v;
  }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

} // namespace bae
