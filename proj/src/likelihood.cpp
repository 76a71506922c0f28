#include "densemem/likelihood.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include "densemem/energy.hpp"
#include "densemem/error.hpp"
#include "densemem/parallel.hpp"

namespace densemem {
namespace {

double fd_divergence(std::span<const double> x, double t, const PatternSet& patterns, double sigma, double h) {
  std::vector<double> probe(x.begin(), x.end());
  double div = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double plus = empirical_score_ve(probe, t, patterns, sigma)[i];
    probe[i] = x[i] - h;
    const double minus = empirical_score_ve(probe, t, patterns, sigma)[i];
    probe[i] = x[i];
    div += (plus - minus) / (2.0 * h);
  }
  return div;
}

}  // namespace

double log_likelihood(std::span<const double> x0, const PatternSet& patterns, const VESchedule& schedule,
                      const LikelihoodOptions& options) {
  schedule.validate();
  if (x0.size() != patterns.n()) throw InvalidArgument("log_likelihood: dimension mismatch");
  const std::size_t n = x0.size();
  const double sigma = schedule.sigma;
  const double half_sigma2 = 0.5 * sigma * sigma;

  auto rhs = [&](double t, std::span<const double> y, std::span<double> dydt) {
    const auto x = y.first(n);
    const auto s = empirical_score_ve(x, t, patterns, sigma);
    for (std::size_t d = 0; d < n; ++d) dydt[d] = -half_sigma2 * s[d];
    double lap = 0.0;
    if (options.divergence == DivergenceMode::kAnalytic) {
      lap = score_divergence_ve(x, t, patterns, sigma);
    } else {
      lap = fd_divergence(x, t, patterns, sigma, options.fd_relative_step * sigma * std::sqrt(t));
    }
    if (!std::isfinite(lap)) throw IntegrationError(0, "non-finite divergence at t=" + std::to_string(t));
    dydt[n] = -half_sigma2 * lap;
  };

  std::vector<double> y(n + 1, 0.0);
  std::copy(x0.begin(), x0.end(), y.begin());
  integrate_dopri5(rhs, schedule.t_min, schedule.t_max, y, options.rk);

  const std::span<const double> x_T(y.data(), n);
  double log_prior = 0.0;
  if (options.prior == LikelihoodPrior::kExactMarginal) {
    log_prior = log_density_ve(x_T, schedule.t_max, patterns, sigma);
  } else {
    const double variance = sigma * sigma * schedule.t_max;
    double norm2 = 0.0;
    for (double v : x_T) norm2 += v * v;
    log_prior = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * variance) - 0.5 * norm2 / variance;
  }
  return log_prior + y[n];
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw InvalidArgument("grid needs at least 2 points per axis");
  if (!(x_max > x_min) || !(y_max > y_min)) throw InvalidArgument("grid bounds must be increasing");
}

ScalarField grid_log_density(const PatternSet& patterns, double t, double sigma, const GridSpec& grid) {
  if (patterns.n() != 2) throw InvalidArgument("grid fields are only defined for 2D patterns");
  grid.validate();
  ScalarField field{grid, std::vector<double>(grid.nx * grid.ny)};
  parallel_for(grid.ny, [&](std::size_t iy) {
    double point[2] = {0.0, grid.y(iy)};
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      point[0] = grid.x(ix);
      field.values[iy * grid.nx + ix] = log_density_ve(point, t, patterns, sigma);
    }
  });
  return field;
}

ScalarField energy_field(const PatternSet& patterns, double t, double sigma, const GridSpec& grid) {
  auto field = grid_log_density(patterns, t, sigma, grid);
  const double scale = -2.0 * sigma * sigma * std::max(t, kMinTime);
  for (double& v : field.values) v *= scale;
  const double lowest = *std::min_element(field.values.begin(), field.values.end());
  for (double& v : field.values) v -= lowest;
  return field;
}

void save_field_csv(const std::filesystem::path& path, const ScalarField& field, const std::string& extra_header) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "# nx=" << field.grid.nx << " ny=" << field.grid.ny;
  if (!extra_header.empty()) out << ' ' << extra_header;
  out << "\nx,y,value\n";
  char buf[64];
  auto put = [&](double v) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, end - buf);
  };
  for (std::size_t iy = 0; iy < field.grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < field.grid.nx; ++ix) {
      put(field.grid.x(ix));
      out << ',';
      put(field.grid.y(iy));
      out << ',';
      put(field.at(ix, iy));
      out << '\n';
    }
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace densemem
