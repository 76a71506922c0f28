#include "densemem/ode.hpp"

#include <algorithm>
#include <cmath>

#include "densemem/error.hpp"

namespace densemem {
namespace {

// Dormand & Prince (1980) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (fifth minus fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

OdeStats integrate_dopri5(const OdeRhs& rhs, double t0, double t1, std::vector<double>& y,
                          const RkConfig& config, const OdeObserver& observer) {
  const std::size_t n = y.size();
  OdeStats stats;
  if (observer) observer(t0, y);
  if (t0 == t1) return stats;
  const double direction = t1 > t0 ? 1.0 : -1.0;

  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);
  auto eval = [&](double t, std::span<const double> state, std::vector<double>& out) {
    rhs(t, state, out);
    ++stats.rhs_evaluations;
  };
  auto scaled_norm = [&](std::span<const double> v, std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = config.abs_tol + config.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
      acc += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(acc / static_cast<double>(std::max<std::size_t>(n, 1)));
  };

  double t = t0;
  eval(t, y, k1);
  if (!all_finite(k1)) throw IntegrationError(0, "non-finite derivative at initial state");

  double h = std::abs(config.initial_step);
  if (h == 0.0) {
    // Hairer, Norsett & Wanner starting-step heuristic.
    const double d0 = scaled_norm(y, y, y);
    const double d1 = scaled_norm(k1, y, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(t1 - t0));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + direction * h0 * k1[i];
    eval(t + direction * h0, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) k2[i] -= k1[i];
    const double d2 = scaled_norm(k2, y, y) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min(h, std::abs(t1 - t0));

  constexpr double safety = 0.9, min_factor = 0.2, max_factor = 10.0;
  std::size_t steps = 0;
  while (direction * (t1 - t) > 0.0) {
    if (++steps > config.max_steps) throw StiffnessError("ODE integration exceeded max_steps");
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw StiffnessError("ODE step size underflow at t=" + std::to_string(t));
    }
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double hs = direction * h;

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    eval(t + c2 * hs, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    eval(t + c3 * hs, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval(t + c4 * hs, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    eval(t + c5 * hs, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    eval(t + hs, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const double t_new = last ? t1 : t + hs;
    eval(t_new, y_new, k7);

    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double err = scaled_norm(tmp, y, y_new);

    if (!std::isfinite(err)) {
      // Usually a too-large step into a region where the rhs blows up; shrink and retry.
      ++stats.rejected;
      h *= min_factor;
      continue;
    }
    if (err <= 1.0) {
      t = t_new;
      y.swap(y_new);
      k1.swap(k7);
      ++stats.accepted;
      if (!all_finite(y)) throw IntegrationError(stats.accepted, "non-finite ODE state");
      if (observer) observer(t, y);
      const double factor = err == 0.0 ? max_factor : std::clamp(safety * std::pow(err, -0.2), min_factor, max_factor);
      h *= factor;
    } else {
      ++stats.rejected;
      h *= std::clamp(safety * std::pow(err, -0.2), min_factor, 1.0);
    }
  }
  return stats;
}

}  // namespace densemem
