#include "densemem/relenergy.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "densemem/energy.hpp"
#include "densemem/error.hpp"

namespace densemem {

InterpolationGrid InterpolationGrid::uniform(std::size_t intervals) {
  if (intervals < 1) throw InvalidArgument("interpolation grid needs at least one interval");
  InterpolationGrid grid;
  grid.alphas.resize(intervals + 1);
  const double half_pi = 0.5 * std::numbers::pi;
  for (std::size_t i = 0; i <= intervals; ++i) {
    grid.alphas[i] = half_pi * static_cast<double>(i) / static_cast<double>(intervals);
  }
  grid.alphas.back() = half_pi;
  return grid;
}

void InterpolationGrid::validate() const {
  if (alphas.size() < 2) throw InvalidArgument("interpolation grid needs at least two points");
  if (alphas.front() != 0.0 || std::abs(alphas.back() - 0.5 * std::numbers::pi) > 1e-15) {
    throw InvalidArgument("interpolation grid must span [0, pi/2]");
  }
  const double step = spacing();
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    const double d = alphas[i] - alphas[i - 1];
    if (!(d > 0.0) || std::abs(d - step) > 1e-12) throw InvalidArgument("interpolation grid must be uniform");
  }
}

std::vector<double> circular_interpolate(std::span<const double> x1, std::span<const double> x2, double alpha) {
  if (x1.size() != x2.size()) throw InvalidArgument("circular_interpolate: dimension mismatch");
  if (!(alpha >= 0.0 && alpha <= 0.5 * std::numbers::pi)) {
    throw InvalidArgument("circular_interpolate: alpha outside [0, pi/2]");
  }
  // cos(pi/2) is 6e-17, not 0; snap the endpoints so they reproduce x1 and x2 exactly.
  const double c = alpha == 0.5 * std::numbers::pi ? 0.0 : std::cos(alpha);
  const double s = alpha == 0.0 ? 0.0 : std::sin(alpha);
  std::vector<double> out(x1.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x1[i] + s * x2[i];
  return out;
}

std::vector<double> vp_potential_gradient(std::span<const double> x, const StaticScoreFn& score0, double beta0) {
  if (!(beta0 > 0.0)) throw InvalidArgument("beta0 must be > 0");
  auto grad = score0(x);
  if (grad.size() != x.size()) throw InvalidArgument("score0 returned the wrong dimension");
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = beta0 * grad[i] - 0.5 * beta0 * x[i];
  return grad;
}

namespace {

// grad u(x(alpha)) . x'(alpha)
double integrand(std::span<const double> x1, std::span<const double> x2, const StaticScoreFn& score0,
                 double beta0, double alpha) {
  const auto x = circular_interpolate(x1, x2, alpha);
  const auto grad = vp_potential_gradient(x, score0, beta0);
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) sum += grad[j] * (-s * x1[j] + c * x2[j]);
  return sum;
}

}  // namespace

double relative_energy(std::span<const double> x1, std::span<const double> x2, const StaticScoreFn& score0,
                       double beta0, const InterpolationGrid& grid) {
  grid.validate();
  if (x1.size() != x2.size()) throw InvalidArgument("relative_energy: dimension mismatch");
  const double d_alpha = grid.spacing();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.alphas.size(); ++i) {
    total += integrand(x1, x2, score0, beta0, grid.alphas[i]) * d_alpha;
  }
  return total;
}

double relative_energy_trapezoid(std::span<const double> x1, std::span<const double> x2,
                                 const StaticScoreFn& score0, double beta0, const InterpolationGrid& grid) {
  grid.validate();
  const double d_alpha = grid.spacing();
  double total = 0.0;
  double left = integrand(x1, x2, score0, beta0, grid.alphas[0]);
  for (std::size_t i = 1; i < grid.alphas.size(); ++i) {
    const double right = integrand(x1, x2, score0, beta0, grid.alphas[i]);
    total += 0.5 * (left + right) * d_alpha;
    left = right;
  }
  return total;
}

EnergyGap energy_gap(std::span<const double> targets, std::span<const double> refs) {
  if (targets.empty() || refs.empty()) throw InvalidArgument("energy_gap: both lists must be nonempty");
  double t_mean = 0.0;
  for (double v : targets) t_mean += v;
  t_mean /= static_cast<double>(targets.size());
  double r_mean = 0.0;
  for (double v : refs) r_mean += v;
  r_mean /= static_cast<double>(refs.size());
  double ss = 0.0;
  for (double v : targets) ss += (v - t_mean) * (v - t_mean);
  return {t_mean - r_mean, std::sqrt(ss / static_cast<double>(targets.size()))};
}

StaticScoreFn make_vp_score0(const PatternSet& patterns, const VPSchedule& schedule) {
  auto shared = std::make_shared<const PatternSet>(patterns);
  return [shared, schedule](std::span<const double> x) { return empirical_score_vp(x, 1, *shared, schedule); };
}

double vp_potential(std::span<const double> x, const PatternSet& patterns, const VPSchedule& schedule) {
  const double beta0 = schedule.beta(1);
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  return beta0 * log_density_vp(x, 1, patterns, schedule) - 0.25 * beta0 * norm2;
}

}  // namespace densemem
