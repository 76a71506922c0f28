#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "densemem/patterns.hpp"
#include "densemem/schedule.hpp"

namespace densemem {

// beta > 0, finite. Along the VE diffusion beta = 1 / (2 sigma^2 t).
class InverseTemperature {
 public:
  explicit InverseTemperature(double beta);
  static InverseTemperature from_ve(double sigma, double t);
  double value() const noexcept { return beta_; }

 private:
  double beta_;
};

// Dense associative memory energy -1/beta log sum_mu exp(-beta ||x - xi_mu||^2), evaluated
// with the smallest squared distance factored out so it stays finite for any beta.
double dense_am_energy(std::span<const double> x, const PatternSet& patterns, InverseTemperature beta);

// Gradient of dense_am_energy: 2 sum_mu w_mu (x - xi_mu).
std::vector<double> dense_am_energy_gradient(std::span<const double> x, const PatternSet& patterns,
                                             InverseTemperature beta);

// dense_am_energy at beta = 1 / (2 sigma^2 t). Requires t > 0; t is clamped to kMinTime.
double diffusion_energy(std::span<const double> x, double t, const PatternSet& patterns, double sigma);

// Normalized responsibilities w_mu ~ exp(-beta ||x - xi_mu||^2).
std::vector<double> softmax_weights(std::span<const double> x, const PatternSet& patterns,
                                    InverseTemperature beta);

// grad_x log p(x, t) for p = (1/K) sum_mu N(x; xi_mu, sigma^2 t I).
std::vector<double> empirical_score_ve(std::span<const double> x, double t, const PatternSet& patterns,
                                       double sigma);

// Laplacian of log p(x, t) for the same mixture, in closed form.
double score_divergence_ve(std::span<const double> x, double t, const PatternSet& patterns, double sigma);

// Fully normalized log p(x, t) of the VE empirical marginal.
double log_density_ve(std::span<const double> x, double t, const PatternSet& patterns, double sigma);

// Score of the VP marginal p_t = (1/K) sum_mu N(x; sqrt(abar_t) xi_mu, (1 - abar_t) I).
std::vector<double> empirical_score_vp(std::span<const double> x, std::size_t step,
                                       const PatternSet& patterns, const VPSchedule& schedule);

double log_density_vp(std::span<const double> x, std::size_t step, const PatternSet& patterns,
                      const VPSchedule& schedule);

// Uniform score interface for the samplers: (x, time) -> grad log p. For VP sources the
// time argument is the integer step index.
using ScoreFn = std::function<std::vector<double>(std::span<const double>, double)>;

ScoreFn make_ve_score(const PatternSet& patterns, double sigma);
ScoreFn make_vp_score(const PatternSet& patterns, const VPSchedule& schedule);

}  // namespace densemem
