#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace densemem {

// Source of i.i.d. standard normal draws consumed by the samplers.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual void fill_normal(std::span<double> out) = 0;
};

// Always yields zero; turns stochastic updates into their deterministic skeleton.
class ZeroNoise final : public NoiseSource {
 public:
  void fill_normal(std::span<double> out) override;
};

// 64-bit Mersenne twister with a Gaussian transform. Reproducible on a given build.
class Rng final : public NoiseSource {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream `index` of master seed `master`. Streams do not depend on the
  // order in which they are created, so parallel fan-out stays reproducible.
  static Rng substream(std::uint64_t master, std::uint64_t index);

  void fill_normal(std::span<double> out) override;
  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

}  // namespace densemem
