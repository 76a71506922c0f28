#pragma once

#include <array>
#include <span>

#include "densemem/energy.hpp"

namespace densemem::circle {

struct PolarPoint {
  double r = 0.0;
  double phi = 0.0;
};

// Crossover between the power series and the large-argument expansion.
inline constexpr double kSeriesLimit = 30.0;

// Modified Bessel functions of the first kind, orders 0 and 1, for 0 <= z <= 1e6.
// Power series up to kSeriesLimit, Hankel asymptotic expansion above.
double bessel_i0(double z);
double bessel_i1(double z);

// log I0(z), log I1(z); finite for every z >= 0 (log I1(0) = -inf).
double log_bessel_i0(double z);
double log_bessel_i1(double z);

// Series-only and asymptotic-only branches, exposed so the crossover can be cross-checked.
double bessel_i0_series(double z);
double bessel_i1_series(double z);
// e^{-z} I_nu(z) from the asymptotic expansion (nu = 0 or 1).
double scaled_bessel_asymptotic(int order, double z);

// I1(z) / I0(z) in [0, 1), without overflow for any z >= 0.
double bessel_ratio(double z);

// E(R) = R^2 + 1 - log(I0(2 beta R)) / beta for the infinite-data unit circle; independent of phi.
double exact_energy(PolarPoint p, InverseTemperature beta);
double exact_energy(std::span<const double> x, InverseTemperature beta);

// The closed-form radial field 2 (I1/I0(2 beta R) - R) x / R, i.e. -grad E. Throws
// InvalidArgument at R = 0 where the direction is undefined.
std::array<double, 2> exact_score(std::span<const double> x, InverseTemperature beta);

// grad log p for p ~ exp(-beta E): beta * exact_score.
std::array<double, 2> boltzmann_score(std::span<const double> x, InverseTemperature beta);

PolarPoint to_polar(std::span<const double> x);

}  // namespace densemem::circle
