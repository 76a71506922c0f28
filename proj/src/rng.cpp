#include "densemem/rng.hpp"

#include <algorithm>

namespace densemem {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Rng Rng::substream(std::uint64_t master, std::uint64_t index) { return Rng(mix_seed(master, index)); }

void Rng::fill_normal(std::span<double> out) {
  for (double& v : out) v = normal_(engine_);
}

void ZeroNoise::fill_normal(std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); }

}  // namespace densemem
