#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "densemem/patterns.hpp"

namespace test {

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(gen);
  return v;
}

inline densemem::PatternSet random_patterns(std::mt19937_64& gen, std::size_t k, std::size_t n, double scale = 1.0) {
  return densemem::PatternSet(random_vector(gen, k * n, scale), k, n);
}

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace test
