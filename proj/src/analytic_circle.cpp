#include "densemem/analytic_circle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "densemem/error.hpp"

namespace densemem::circle {
namespace {

void check_argument(double z) {
  if (!(z >= 0.0) || z > 1e6) throw InvalidArgument("Bessel argument must lie in [0, 1e6]");
}

// sum_k (z/2)^{2k + order} / (k! (k + order)!)
double series(int order, double z) {
  const double q = 0.25 * z * z;
  double term = order == 0 ? 1.0 : 0.5 * z;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace

double bessel_i0_series(double z) {
  check_argument(z);
  return series(0, z);
}

double bessel_i1_series(double z) {
  check_argument(z);
  return series(1, z);
}

double scaled_bessel_asymptotic(int order, double z) {
  if (!(z > 0.0)) throw InvalidArgument("asymptotic Bessel expansion needs z > 0");
  // I_nu(z) ~ e^z / sqrt(2 pi z) sum_k (-1)^k a_k(nu) / z^k,
  // a_k = prod_{j=1..k} (4 nu^2 - (2j - 1)^2) / (k! 8^k)
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (static_cast<double>(k) * 8.0 * z);
    if (std::abs(term) >= previous) break;  // divergent tail
    sum += term;
    previous = std::abs(term);
    if (previous < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

double bessel_i0(double z) {
  check_argument(z);
  if (z <= kSeriesLimit) return series(0, z);
  return std::exp(log_bessel_i0(z));
}

double bessel_i1(double z) {
  check_argument(z);
  if (z <= kSeriesLimit) return series(1, z);
  return std::exp(log_bessel_i1(z));
}

double log_bessel_i0(double z) {
  check_argument(z);
  if (z <= kSeriesLimit) return std::log(series(0, z));
  return z + std::log(scaled_bessel_asymptotic(0, z));
}

double log_bessel_i1(double z) {
  check_argument(z);
  if (z <= kSeriesLimit) return std::log(series(1, z));
  return z + std::log(scaled_bessel_asymptotic(1, z));
}

double bessel_ratio(double z) {
  if (!(z >= 0.0)) throw InvalidArgument("bessel_ratio: z must be >= 0");
  if (z == 0.0) return 0.0;
  if (z <= kSeriesLimit) return series(1, z) / series(0, z);
  if (z > 1e6) return 1.0 - 0.5 / z - 0.125 / (z * z);
  return scaled_bessel_asymptotic(1, z) / scaled_bessel_asymptotic(0, z);
}

PolarPoint to_polar(std::span<const double> x) {
  if (x.size() != 2) throw InvalidArgument("circle model points are two-dimensional");
  return {std::hypot(x[0], x[1]), std::atan2(x[1], x[0])};
}

double exact_energy(PolarPoint p, InverseTemperature beta) {
  if (!(p.r >= 0.0)) throw InvalidArgument("radius must be >= 0");
  const double b = beta.value();
  return p.r * p.r + 1.0 - log_bessel_i0(2.0 * b * p.r) / b;
}

double exact_energy(std::span<const double> x, InverseTemperature beta) { return exact_energy(to_polar(x), beta); }

std::array<double, 2> exact_score(std::span<const double> x, InverseTemperature beta) {
  const auto p = to_polar(x);
  if (p.r == 0.0) throw InvalidArgument("exact_score: direction undefined at R = 0");
  const double radial = 2.0 * (bessel_ratio(2.0 * beta.value() * p.r) - p.r);
  return {radial * x[0] / p.r, radial * x[1] / p.r};
}

std::array<double, 2> boltzmann_score(std::span<const double> x, InverseTemperature beta) {
  auto s = exact_score(x, beta);
  s[0] *= beta.value();
  s[1] *= beta.value();
  return s;
}

}  // namespace densemem::circle
