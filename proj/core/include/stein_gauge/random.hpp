#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace stein_gauge {

/// Counter-based 64-bit generator: the i-th output of stream (seed, stream)
/// is a pure function of (seed, stream, i), so any replica can be replayed
/// without touching the others.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (counter_++) * kGolden); }

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal draws from one CounterRng stream.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double operator()() { return normal_(rng_); }

  template <typename Derived>
  void fill(Eigen::DenseBase<Derived>& out, double scale = 1.0) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out.derived().coeffRef(i) = scale * normal_(rng_);
  }

  CounterRng& engine() { return rng_; }

 private:
  CounterRng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace stein_gauge
