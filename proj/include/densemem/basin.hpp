#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "densemem/energy.hpp"
#include "densemem/schedule.hpp"

namespace densemem {

struct CriticalTimeConfig {
  std::size_t m_trials = 20;    // perturbations per pattern
  std::size_t stride = 10;      // timestep stride
  std::size_t ddim_steps = 10;  // deterministic denoising steps
  double delta_d = 0.1;         // recovery distance; +inf accepts every denoised result
  double delta_p = 0.8;         // stop once the recovery fraction drops below this

  void validate() const;
};

// Per-trial critical timestep, basin radius ||x0 - x_{t_c}|| and log-volume of the N-ball
// of that radius. A trial that never recovers has t_c = 0, radius 0 and log-volume -inf.
struct BasinResult {
  std::size_t dim = 0;
  std::vector<std::size_t> t_c;
  std::vector<double> radii;
  std::vector<double> log_volume;
  std::vector<double> perturbed;  // m_trials x dim, the state x_{t_c} of each trial

  // Mean log-volume over trials with a positive radius; -inf when there is none.
  double mean_log_volume() const;
  double mean_t_c() const;
};

// Timesteps visited by the critical-time search: 1, 1 + s, 1 + 2s, ... below T - s - 1,
// then T - s - 1 itself.
std::vector<std::size_t> critical_time_grid(std::size_t T, std::size_t stride);

// Critical-time search for one pattern. Every trial draws fresh forward noise at every
// visited timestep from its own substream Rng::substream(seed, trial). A trial stops
// permanently at its first failed recovery; its t_c keeps the last successful timestep.
// The search ends early when the fraction of trials recovered at the current timestep
// falls below delta_p.
BasinResult critical_time(std::span<const double> x0, const ScoreFn& score, const VPSchedule& schedule,
                          const CriticalTimeConfig& config, std::uint64_t seed);

double basin_radius(std::span<const double> x0, std::span<const double> x_tc);

// log of pi^{N/2} / Gamma(N/2 + 1) R^N, evaluated in log space.
double log_volume(double radius, std::size_t n);

struct SampleGroup {
  std::string name;
  std::vector<std::vector<double>> points;  // already sorted by the caller
  bool exempt_from_size_rule = false;       // training data is never dropped for being small
};

struct BasinGroupStats {
  std::string name;
  std::size_t available = 0;
  std::size_t used = 0;
  bool excluded = false;
  std::string reason;
  double mean_log_volume = 0.0;  // over samples with a finite per-sample log-volume
  double std_log_volume = 0.0;
  std::size_t zero_volume = 0;   // samples none of whose trials recovered
  double mean_t_c = 0.0;
  std::vector<BasinResult> results;
};

struct BasinSweepConfig {
  CriticalTimeConfig critical;
  std::size_t per_type_cap = 512;
  double min_group_fraction = 1e-3;  // of the synthetic set size
};

// Runs critical_time over the first per_type_cap points of every group. Groups smaller
// than min_group_fraction * synthetic_size (and empty groups) are reported as excluded.
std::vector<BasinGroupStats> sweep_basins(std::span<const SampleGroup> groups, std::size_t synthetic_size,
                                          const ScoreFn& score, const VPSchedule& schedule,
                                          const BasinSweepConfig& config, std::uint64_t seed);

}  // namespace densemem
