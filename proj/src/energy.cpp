#include "densemem/energy.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "densemem/error.hpp"
#include "densemem/simd/kernels.hpp"

namespace densemem {
namespace {

void check_dim(std::span<const double> x, const PatternSet& patterns) {
  if (x.size() != patterns.n()) {
    throw InvalidArgument("query has dimension " + std::to_string(x.size()) + ", patterns have " +
                          std::to_string(patterns.n()));
  }
}

double checked_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("diffusion time must be > 0");
  return std::max(t, kMinTime);
}

// Unnormalized Gaussian responsibilities around centers `scale * xi_mu`:
// weights[mu] = exp(-(d2[mu] - min_d2) / (2 variance)), sum = sum of weights.
struct Responsibilities {
  std::vector<double> d2;
  std::vector<double> weights;
  double min_d2 = 0.0;
  double sum = 0.0;
};

Responsibilities responsibilities(std::span<const double> x, const PatternSet& patterns, double center_scale,
                                  double beta) {
  const auto& kern = simd::kernels();
  const auto points = patterns.columns();
  Responsibilities r;
  r.d2.resize(patterns.k());
  r.weights.resize(patterns.k());
  if (center_scale == 1.0) {
    kern.squared_distances(x, points, r.d2);
  } else {
    // ||x - c xi||^2 = c^2 ||x / c - xi||^2
    std::vector<double> scaled(x.begin(), x.end());
    for (double& v : scaled) v /= center_scale;
    kern.squared_distances(scaled, points, r.d2);
    const double c2 = center_scale * center_scale;
    for (double& v : r.d2) v *= c2;
  }
  r.min_d2 = r.d2[kern.argmin(r.d2)];
  r.sum = kern.exp_shifted(r.d2, r.min_d2, beta, r.weights);
  return r;
}

// sum_mu w_mu xi_mu / sum_mu w_mu
std::vector<double> weighted_mean(const Responsibilities& r, const PatternSet& patterns) {
  const auto& kern = simd::kernels();
  const auto points = patterns.columns();
  std::vector<double> mean(patterns.n());
  for (std::size_t d = 0; d < patterns.n(); ++d) mean[d] = kern.dot(r.weights, points.column(d)) / r.sum;
  return mean;
}

double ve_variance(double sigma, double t) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be finite and > 0");
  return sigma * sigma * checked_time(t);
}

}  // namespace

InverseTemperature::InverseTemperature(double beta) : beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("inverse temperature must be finite and > 0");
}

InverseTemperature InverseTemperature::from_ve(double sigma, double t) {
  return InverseTemperature(0.5 / ve_variance(sigma, t));
}

double dense_am_energy(std::span<const double> x, const PatternSet& patterns, InverseTemperature beta) {
  check_dim(x, patterns);
  const auto r = responsibilities(x, patterns, 1.0, beta.value());
  return r.min_d2 - std::log(r.sum) / beta.value();
}

std::vector<double> dense_am_energy_gradient(std::span<const double> x, const PatternSet& patterns,
                                             InverseTemperature beta) {
  check_dim(x, patterns);
  const auto r = responsibilities(x, patterns, 1.0, beta.value());
  auto grad = weighted_mean(r, patterns);
  for (std::size_t d = 0; d < grad.size(); ++d) grad[d] = 2.0 * (x[d] - grad[d]);
  return grad;
}

double diffusion_energy(std::span<const double> x, double t, const PatternSet& patterns, double sigma) {
  return dense_am_energy(x, patterns, InverseTemperature::from_ve(sigma, t));
}

std::vector<double> softmax_weights(std::span<const double> x, const PatternSet& patterns,
                                    InverseTemperature beta) {
  check_dim(x, patterns);
  auto r = responsibilities(x, patterns, 1.0, beta.value());
  for (double& w : r.weights) w /= r.sum;
  return std::move(r.weights);
}

std::vector<double> empirical_score_ve(std::span<const double> x, double t, const PatternSet& patterns,
                                       double sigma) {
  check_dim(x, patterns);
  const double variance = ve_variance(sigma, t);
  const auto r = responsibilities(x, patterns, 1.0, 0.5 / variance);
  auto score = weighted_mean(r, patterns);
  for (std::size_t d = 0; d < score.size(); ++d) score[d] = -(x[d] - score[d]) / variance;
  return score;
}

double score_divergence_ve(std::span<const double> x, double t, const PatternSet& patterns, double sigma) {
  check_dim(x, patterns);
  const double variance = ve_variance(sigma, t);
  const auto r = responsibilities(x, patterns, 1.0, 0.5 / variance);
  const auto mean = weighted_mean(r, patterns);
  const double mean_d2 = simd::kernels().dot(r.weights, r.d2) / r.sum;
  double offset2 = 0.0;
  for (std::size_t d = 0; d < mean.size(); ++d) offset2 += (x[d] - mean[d]) * (x[d] - mean[d]);
  // tr Hess log p = -N / v + (E_w ||x - xi||^2 - ||E_w (x - xi)||^2) / v^2
  const double spread = std::max(mean_d2 - offset2, 0.0);
  return (-static_cast<double>(patterns.n()) + spread / variance) / variance;
}

double log_density_ve(std::span<const double> x, double t, const PatternSet& patterns, double sigma) {
  check_dim(x, patterns);
  const double variance = ve_variance(sigma, t);
  const auto r = responsibilities(x, patterns, 1.0, 0.5 / variance);
  const double n = static_cast<double>(patterns.n());
  return -0.5 * n * std::log(2.0 * std::numbers::pi * variance) - std::log(static_cast<double>(patterns.k())) -
         r.min_d2 / (2.0 * variance) + std::log(r.sum);
}

std::vector<double> empirical_score_vp(std::span<const double> x, std::size_t step, const PatternSet& patterns,
                                       const VPSchedule& schedule) {
  check_dim(x, patterns);
  schedule.check_step(step);
  const double abar = schedule.alpha_bar(step);
  const double scale = std::sqrt(abar);
  const double variance = 1.0 - abar;
  const auto r = responsibilities(x, patterns, scale, 0.5 / variance);
  auto score = weighted_mean(r, patterns);
  for (std::size_t d = 0; d < score.size(); ++d) score[d] = -(x[d] - scale * score[d]) / variance;
  return score;
}

double log_density_vp(std::span<const double> x, std::size_t step, const PatternSet& patterns,
                      const VPSchedule& schedule) {
  check_dim(x, patterns);
  schedule.check_step(step);
  const double abar = schedule.alpha_bar(step);
  const double variance = 1.0 - abar;
  const auto r = responsibilities(x, patterns, std::sqrt(abar), 0.5 / variance);
  const double n = static_cast<double>(patterns.n());
  return -0.5 * n * std::log(2.0 * std::numbers::pi * variance) - std::log(static_cast<double>(patterns.k())) -
         r.min_d2 / (2.0 * variance) + std::log(r.sum);
}

ScoreFn make_ve_score(const PatternSet& patterns, double sigma) {
  auto shared = std::make_shared<const PatternSet>(patterns);
  return [shared, sigma](std::span<const double> x, double t) {
    return empirical_score_ve(x, t, *shared, sigma);
  };
}

ScoreFn make_vp_score(const PatternSet& patterns, const VPSchedule& schedule) {
  auto shared = std::make_shared<const PatternSet>(patterns);
  return [shared, schedule](std::span<const double> x, double step) {
    return empirical_score_vp(x, static_cast<std::size_t>(std::llround(step)), *shared, schedule);
  };
}

}  // namespace densemem
