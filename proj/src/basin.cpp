#include "densemem/basin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "densemem/error.hpp"
#include "densemem/parallel.hpp"
#include "densemem/rng.hpp"
#include "densemem/samplers.hpp"

namespace densemem {

void CriticalTimeConfig::validate() const {
  if (m_trials < 1) throw InvalidArgument("critical time: m_trials must be >= 1");
  if (stride < 1) throw InvalidArgument("critical time: stride must be >= 1");
  if (ddim_steps < 1) throw InvalidArgument("critical time: ddim_steps must be >= 1");
  if (!(delta_p > 0.0 && delta_p <= 1.0)) throw InvalidArgument("critical time: delta_p must lie in (0, 1]");
  if (!(delta_d >= 0.0)) throw InvalidArgument("critical time: delta_d must be >= 0");
}

double BasinResult::mean_log_volume() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : log_volume) {
    if (std::isfinite(v)) {
      sum += v;
      ++n;
    }
  }
  return n == 0 ? -std::numeric_limits<double>::infinity() : sum / static_cast<double>(n);
}

double BasinResult::mean_t_c() const {
  double sum = 0.0;
  for (auto t : t_c) sum += static_cast<double>(t);
  return t_c.empty() ? 0.0 : sum / static_cast<double>(t_c.size());
}

std::vector<std::size_t> critical_time_grid(std::size_t T, std::size_t stride) {
  if (stride < 1 || T < stride + 2) throw InvalidArgument("critical time grid needs T >= stride + 2");
  const std::size_t last = T - stride - 1;
  std::vector<std::size_t> grid;
  for (std::size_t t = 1; t < last; t += stride) grid.push_back(t);
  grid.push_back(last);
  return grid;
}

BasinResult critical_time(std::span<const double> x0, const ScoreFn& score, const VPSchedule& schedule,
                          const CriticalTimeConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t m = config.m_trials;
  const std::size_t dim = x0.size();
  for (double v : x0) {
    if (!std::isfinite(v)) throw InvalidArgument("critical time: x0 must be finite");
  }

  BasinResult result;
  result.dim = dim;
  result.t_c.assign(m, 0);
  result.perturbed.resize(m * dim);
  for (std::size_t i = 0; i < m; ++i) std::copy(x0.begin(), x0.end(), result.perturbed.begin() + i * dim);

  std::vector<Rng> streams;
  streams.reserve(m);
  for (std::size_t i = 0; i < m; ++i) streams.push_back(Rng::substream(seed, i));
  std::vector<char> stopped(m, 0);
  std::vector<char> recovered(m, 0);
  std::vector<std::vector<double>> x_t(m);

  for (std::size_t t : critical_time_grid(schedule.T(), config.stride)) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < m; ++i) {
      x_t[i] = forward_perturb_vp(x0, t, schedule, streams[i]);
      const auto x0_hat = ddim_denoise(score, x_t[i], t, config.ddim_steps, schedule);
      recovered[i] = basin_radius(x0_hat, x0) <= config.delta_d;
      hits += recovered[i] ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(m);
    if (p < config.delta_p) break;
    for (std::size_t i = 0; i < m; ++i) {
      if (!recovered[i]) stopped[i] = 1;
      if (!stopped[i]) {
        result.t_c[i] = t;
        std::copy(x_t[i].begin(), x_t[i].end(), result.perturbed.begin() + i * dim);
      }
    }
  }

  result.radii.resize(m);
  result.log_volume.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    result.radii[i] = basin_radius(x0, {result.perturbed.data() + i * dim, dim});
    result.log_volume[i] = result.radii[i] > 0.0 ? log_volume(result.radii[i], dim)
                                                 : -std::numeric_limits<double>::infinity();
  }
  return result;
}

double basin_radius(std::span<const double> x0, std::span<const double> x_tc) {
  if (x0.size() != x_tc.size()) throw InvalidArgument("basin_radius: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) acc += (x0[i] - x_tc[i]) * (x0[i] - x_tc[i]);
  return std::sqrt(acc);
}

double log_volume(double radius, std::size_t n) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("log_volume: radius must be > 0");
  if (n < 1) throw InvalidArgument("log_volume: dimension must be >= 1");
  const double half_n = 0.5 * static_cast<double>(n);
  return half_n * std::log(std::numbers::pi) - std::lgamma(half_n + 1.0) + static_cast<double>(n) * std::log(radius);
}

std::vector<BasinGroupStats> sweep_basins(std::span<const SampleGroup> groups, std::size_t synthetic_size,
                                          const ScoreFn& score, const VPSchedule& schedule,
                                          const BasinSweepConfig& config, std::uint64_t seed) {
  config.critical.validate();
  std::vector<BasinGroupStats> out;
  out.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& group = groups[g];
    BasinGroupStats stats;
    stats.name = group.name;
    stats.available = group.points.size();
    const double min_size = config.min_group_fraction * static_cast<double>(synthetic_size);
    if (group.points.empty()) {
      stats.excluded = true;
      stats.reason = "empty";
    } else if (!group.exempt_from_size_rule && static_cast<double>(group.points.size()) < min_size) {
      stats.excluded = true;
      stats.reason = "fewer than " + std::to_string(config.min_group_fraction * 100.0) + "% of synthetic set";
    }
    if (stats.excluded) {
      out.push_back(std::move(stats));
      continue;
    }
    stats.used = std::min(config.per_type_cap, group.points.size());
    stats.results.resize(stats.used);
    const std::uint64_t group_seed = mix_seed(seed, g);
    parallel_for(stats.used, [&](std::size_t i) {
      stats.results[i] = critical_time(group.points[i], score, schedule, config.critical, mix_seed(group_seed, i));
    });

    double t_sum = 0.0;
    std::vector<double> finite;
    for (const auto& r : stats.results) {
      t_sum += r.mean_t_c();
      const double v = r.mean_log_volume();
      if (std::isfinite(v)) {
        finite.push_back(v);
      } else {
        ++stats.zero_volume;
      }
    }
    stats.mean_t_c = t_sum / static_cast<double>(stats.used);
    if (finite.empty()) {
      stats.mean_log_volume = -std::numeric_limits<double>::infinity();
    } else {
      double sum = 0.0;
      for (double v : finite) sum += v;
      stats.mean_log_volume = sum / static_cast<double>(finite.size());
      double ss = 0.0;
      for (double v : finite) ss += (v - stats.mean_log_volume) * (v - stats.mean_log_volume);
      stats.std_log_volume = std::sqrt(ss / static_cast<double>(finite.size()));
    }
    out.push_back(std::move(stats));
  }
  return out;
}

}  // namespace densemem
