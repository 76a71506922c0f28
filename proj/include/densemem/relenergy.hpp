#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "densemem/patterns.hpp"
#include "densemem/schedule.hpp"

namespace densemem {

// L + 1 uniformly spaced angles from 0 to pi/2.
struct InterpolationGrid {
  std::vector<double> alphas;

  static InterpolationGrid uniform(std::size_t intervals = 19);
  std::size_t intervals() const noexcept { return alphas.empty() ? 0 : alphas.size() - 1; }
  double spacing() const { return alphas.at(1) - alphas.at(0); }
  void validate() const;
};

// Score at a fixed (earliest) time: x -> grad log p0(x).
using StaticScoreFn = std::function<std::vector<double>(std::span<const double>)>;

// cos(alpha) x1 + sin(alpha) x2, alpha in [0, pi/2].
std::vector<double> circular_interpolate(std::span<const double> x1, std::span<const double> x2, double alpha);

// grad u = beta0 score0(x) - beta0 x / 2 for u(x) = beta0 log p0(x) - beta0 ||x||^2 / 4.
std::vector<double> vp_potential_gradient(std::span<const double> x, const StaticScoreFn& score0, double beta0);

// Left-endpoint Riemann sum of grad u(x(alpha)) . x'(alpha) dalpha over the grid, where
// x(alpha) is the circular interpolation from x1 (alpha = 0) to x2 (alpha = pi/2). The dot
// product sums over all coordinates.
double relative_energy(std::span<const double> x1, std::span<const double> x2, const StaticScoreFn& score0,
                       double beta0, const InterpolationGrid& grid);

// Trapezoid rule on the same grid; a cross-check only.
double relative_energy_trapezoid(std::span<const double> x1, std::span<const double> x2,
                                 const StaticScoreFn& score0, double beta0, const InterpolationGrid& grid);

struct EnergyGap {
  double gap = 0.0;         // mean(targets) - mean(refs)
  double target_std = 0.0;  // population standard deviation of targets
};

EnergyGap energy_gap(std::span<const double> targets, std::span<const double> refs);

// The exact empirical VP score at step 1 (the earliest available time) and beta0 = beta(1).
StaticScoreFn make_vp_score0(const PatternSet& patterns, const VPSchedule& schedule);
// u(x) = beta0 log p_1(x) - beta0 ||x||^2 / 4, evaluated directly from the density.
double vp_potential(std::span<const double> x, const PatternSet& patterns, const VPSchedule& schedule);

}  // namespace densemem
