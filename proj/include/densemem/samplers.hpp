#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "densemem/energy.hpp"
#include "densemem/ode.hpp"
#include "densemem/patterns.hpp"
#include "densemem/rng.hpp"
#include "densemem/schedule.hpp"

namespace densemem {

// Row i of `states` is the state at times[i]; times are strictly monotone.
struct Trajectory {
  std::size_t dim = 0;
  std::vector<double> states;
  std::vector<double> times;

  std::size_t size() const noexcept { return times.size(); }
  std::span<const double> state(std::size_t i) const { return {states.data() + i * dim, dim}; }
  std::span<const double> final_state() const { return state(size() - 1); }
};

enum class Direction { kForward, kBackward };

// x0 + sigma sqrt(t) z, t in [t_min, t_max].
std::vector<double> forward_perturb_ve(std::span<const double> x0, double t, const VESchedule& schedule,
                                       NoiseSource& noise);

// sqrt(abar_t) x0 + sqrt(1 - abar_t) z, 1 <= step <= T.
std::vector<double> forward_perturb_vp(std::span<const double> x0, std::size_t step, const VPSchedule& schedule,
                                       NoiseSource& noise);

// Euler-Maruyama for dx = -sigma^2 score dt + sigma dw, run from t_max down to t_min on the
// uniform grid. Throws IntegrationError carrying the step index if the score goes non-finite.
Trajectory reverse_sde_euler_maruyama(const ScoreFn& score, std::span<const double> x_init,
                                      const VESchedule& schedule, NoiseSource& noise);

// Explicit Euler for the probability-flow ODE dx/dt = -drift_scale * sigma^2 score on the
// same uniform grid as the reverse SDE. drift_scale = 1/2 is the true PF-ODE.
Trajectory pf_ode_euler(const ScoreFn& score, std::span<const double> x_init, const VESchedule& schedule,
                        Direction direction, double drift_scale = 0.5);

// Probability-flow ODE dx/dt = -1/2 sigma^2 score(x, t) with adaptive Dormand-Prince 5(4).
// Backward runs t_max -> t_min, forward t_min -> t_max.
Trajectory pf_ode_integrate(const ScoreFn& score, std::span<const double> x_init, const VESchedule& schedule,
                            Direction direction, const RkConfig& config = {});

// Indices used by ddim_denoise: evenly spaced integers from `step` down to 0 inclusive,
// with min(n_steps, step) intervals.
std::vector<std::size_t> ddim_timesteps(std::size_t step, std::size_t n_steps);

// Deterministic (eta = 0) DDIM from `step` to 0. The score callable receives the step index
// as its time argument. Returns the final x0 prediction.
std::vector<double> ddim_denoise(const ScoreFn& score, std::span<const double> x_t, std::size_t step,
                                 std::size_t n_steps, const VPSchedule& schedule);

// `count` (default 4K) independent reverse-SDE runs from x_T ~ N(0, sigma^2 t_max I) with
// the exact empirical VE score. Run i draws from Rng::substream(seed, i).
SampleSet generate_synthetic_set(const PatternSet& patterns, const VESchedule& schedule,
                                 std::optional<std::size_t> count, std::uint64_t seed);

}  // namespace densemem
