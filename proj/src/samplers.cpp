#include "densemem/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "densemem/error.hpp"
#include "densemem/parallel.hpp"

namespace densemem {
namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_score(std::span<const double> s, std::size_t dim, std::size_t step) {
  if (s.size() != dim) throw InvalidArgument("score returned a vector of the wrong dimension");
  if (!all_finite(s)) throw IntegrationError(step, "score returned a non-finite value; integration diverged");
}

}  // namespace

std::vector<double> forward_perturb_ve(std::span<const double> x0, double t, const VESchedule& schedule,
                                       NoiseSource& noise) {
  schedule.validate();
  if (!(t >= schedule.t_min && t <= schedule.t_max)) {
    throw InvalidArgument("forward_perturb_ve: t outside [t_min, t_max]");
  }
  std::vector<double> z(x0.size());
  noise.fill_normal(z);
  const double scale = schedule.sigma * std::sqrt(t);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x0[i] + scale * z[i];
  return z;
}

std::vector<double> forward_perturb_vp(std::span<const double> x0, std::size_t step, const VPSchedule& schedule,
                                       NoiseSource& noise) {
  schedule.check_step(step);
  const double abar = schedule.alpha_bar(step);
  const double signal = std::sqrt(abar);
  const double spread = std::sqrt(1.0 - abar);
  std::vector<double> z(x0.size());
  noise.fill_normal(z);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = signal * x0[i] + spread * z[i];
  return z;
}

Trajectory reverse_sde_euler_maruyama(const ScoreFn& score, std::span<const double> x_init,
                                      const VESchedule& schedule, NoiseSource& noise) {
  const auto times = schedule.reverse_grid();
  const std::size_t dim = x_init.size();
  if (!all_finite(x_init)) throw InvalidArgument("reverse SDE: initial state is not finite");
  Trajectory traj{dim, {}, times};
  traj.states.reserve((times.size()) * dim);
  std::vector<double> x(x_init.begin(), x_init.end());
  std::vector<double> z(dim);
  const double sigma2 = schedule.sigma * schedule.sigma;
  traj.states.insert(traj.states.end(), x.begin(), x.end());
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double dt = times[i + 1] - times[i];  // negative
    const auto s = score(x, times[i]);
    check_score(s, dim, i);
    noise.fill_normal(z);
    const double diffusion = schedule.sigma * std::sqrt(-dt);
    for (std::size_t d = 0; d < dim; ++d) x[d] += -sigma2 * s[d] * dt + diffusion * z[d];
    if (!all_finite(x)) throw IntegrationError(i, "state became non-finite");
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  }
  return traj;
}

Trajectory pf_ode_euler(const ScoreFn& score, std::span<const double> x_init, const VESchedule& schedule,
                        Direction direction, double drift_scale) {
  auto times = schedule.reverse_grid();
  if (direction == Direction::kForward) std::reverse(times.begin(), times.end());
  const std::size_t dim = x_init.size();
  Trajectory traj{dim, {}, times};
  std::vector<double> x(x_init.begin(), x_init.end());
  const double sigma2 = schedule.sigma * schedule.sigma;
  traj.states.insert(traj.states.end(), x.begin(), x.end());
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double dt = times[i + 1] - times[i];
    const auto s = score(x, times[i]);
    check_score(s, dim, i);
    for (std::size_t d = 0; d < dim; ++d) x[d] += -drift_scale * sigma2 * s[d] * dt;
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  }
  return traj;
}

Trajectory pf_ode_integrate(const ScoreFn& score, std::span<const double> x_init, const VESchedule& schedule,
                            Direction direction, const RkConfig& config) {
  schedule.validate();
  if (!all_finite(x_init)) throw InvalidArgument("PF-ODE: initial state is not finite");
  const std::size_t dim = x_init.size();
  const double t0 = direction == Direction::kBackward ? schedule.t_max : schedule.t_min;
  const double t1 = direction == Direction::kBackward ? schedule.t_min : schedule.t_max;
  const double half_sigma2 = 0.5 * schedule.sigma * schedule.sigma;
  std::size_t evaluations = 0;
  auto rhs = [&](double t, std::span<const double> x, std::span<double> dxdt) {
    const auto s = score(x, t);
    check_score(s, dim, evaluations++);
    for (std::size_t d = 0; d < dim; ++d) dxdt[d] = -half_sigma2 * s[d];
  };
  Trajectory traj{dim, {}, {}};
  auto observe = [&](double t, std::span<const double> x) {
    traj.times.push_back(t);
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  };
  std::vector<double> y(x_init.begin(), x_init.end());
  integrate_dopri5(rhs, t0, t1, y, config, observe);
  return traj;
}

std::vector<std::size_t> ddim_timesteps(std::size_t step, std::size_t n_steps) {
  if (n_steps == 0) throw InvalidArgument("ddim: n_steps must be >= 1");
  const std::size_t intervals = std::min(n_steps, step);
  std::vector<std::size_t> idx(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    // round(step * (intervals - j) / intervals), exact in integers
    const std::size_t num = step * (intervals - j);
    idx[j] = (2 * num + intervals) / (2 * intervals);
  }
  return idx;
}

std::vector<double> ddim_denoise(const ScoreFn& score, std::span<const double> x_t, std::size_t step,
                                 std::size_t n_steps, const VPSchedule& schedule) {
  schedule.check_step(step);
  const auto idx = ddim_timesteps(step, n_steps);
  const std::size_t dim = x_t.size();
  std::vector<double> x(x_t.begin(), x_t.end());
  std::vector<double> x0_hat(dim), eps(dim);
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    const std::size_t t = idx[j];
    const std::size_t prev = idx[j + 1];
    const double abar = schedule.alpha_bar(t);
    const double abar_prev = schedule.alpha_bar(prev);
    const double spread = std::sqrt(1.0 - abar);
    const auto s = score(x, static_cast<double>(t));
    check_score(s, dim, j);
    for (std::size_t d = 0; d < dim; ++d) {
      eps[d] = -spread * s[d];
      x0_hat[d] = (x[d] - spread * eps[d]) / std::sqrt(abar);
      x[d] = std::sqrt(abar_prev) * x0_hat[d] + std::sqrt(1.0 - abar_prev) * eps[d];
    }
  }
  return x0_hat;
}

SampleSet generate_synthetic_set(const PatternSet& patterns, const VESchedule& schedule,
                                 std::optional<std::size_t> count, std::uint64_t seed) {
  schedule.validate();
  const std::size_t m = count.value_or(4 * patterns.k());
  if (m == 0) throw InvalidArgument("generate_synthetic_set: count must be >= 1");
  const std::size_t dim = patterns.n();
  const auto score = make_ve_score(patterns, schedule.sigma);
  const double prior_scale = schedule.sigma * std::sqrt(schedule.t_max);
  std::vector<double> values(m * dim);
  parallel_for(m, [&](std::size_t run) {
    Rng rng = Rng::substream(seed, run);
    std::vector<double> x(dim);
    rng.fill_normal(x);
    for (double& v : x) v *= prior_scale;
    try {
      const auto traj = reverse_sde_euler_maruyama(score, x, schedule, rng);
      const auto final_state = traj.final_state();
      std::copy(final_state.begin(), final_state.end(), values.begin() + static_cast<std::ptrdiff_t>(run * dim));
    } catch (const IntegrationError& e) {
      throw IntegrationError(e.step(), "run " + std::to_string(run) + ": " + e.what());
    }
  });
  return SampleSet(std::move(values), m, dim, patterns.k(), schedule.id(), seed);
}

}  // namespace densemem
