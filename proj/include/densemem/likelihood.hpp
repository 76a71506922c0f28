#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "densemem/ode.hpp"
#include "densemem/patterns.hpp"
#include "densemem/schedule.hpp"

namespace densemem {

enum class LikelihoodPrior {
  kExactMarginal,   // the empirical mixture at t_max, in closed form
  kStandardNormal,  // N(0, sigma^2 t_max I)
};

enum class DivergenceMode {
  kAnalytic,          // closed-form Laplacian of log p
  kFiniteDifference,  // central differences of the score
};

struct LikelihoodOptions {
  RkConfig rk;
  LikelihoodPrior prior = LikelihoodPrior::kExactMarginal;
  DivergenceMode divergence = DivergenceMode::kAnalytic;
  double fd_relative_step = 1e-4;  // in units of the kernel width sigma sqrt(t)
};

// log p_{t_min}(x0) by the instantaneous change of variables: integrate
// (x, l)' = (-sigma^2/2 score, -sigma^2/2 laplacian log p) from t_min to t_max, then add the
// prior log-density at x(t_max).
double log_likelihood(std::span<const double> x0, const PatternSet& patterns, const VESchedule& schedule,
                      const LikelihoodOptions& options = {});

struct GridSpec {
  double x_min = -1.5, x_max = 1.5;
  std::size_t nx = 101;
  double y_min = -1.5, y_max = 1.5;
  std::size_t ny = 101;

  void validate() const;
  double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
  double dy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
  double x(std::size_t ix) const { return x_min + dx() * static_cast<double>(ix); }
  double y(std::size_t iy) const { return y_min + dy() * static_cast<double>(iy); }
};

// values[iy * nx + ix] at (grid.x(ix), grid.y(iy)).
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  double at(std::size_t ix, std::size_t iy) const { return values[iy * grid.nx + ix]; }
};

// Exact normalized log p(x, t) of the 2D empirical VE marginal on a rectangular grid.
ScalarField grid_log_density(const PatternSet& patterns, double t, double sigma, const GridSpec& grid);

// -2 sigma^2 t log p on the grid, shifted so that its minimum is exactly 0.
ScalarField energy_field(const PatternSet& patterns, double t, double sigma, const GridSpec& grid);

// Rows `x,y,value` under a `# ` header line carrying `extra_header`.
void save_field_csv(const std::filesystem::path& path, const ScalarField& field, const std::string& extra_header = {});

}  // namespace densemem
