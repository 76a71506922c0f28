#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace densemem {

struct RkConfig {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  double initial_step = 0.0;  // 0 selects a step from the local derivative scale
  std::size_t max_steps = 1'000'000;
};

// dy/dt = f(t, y); the right-hand side writes into `dydt`.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
// Called after every accepted step (and once for the initial state).
using OdeObserver = std::function<void(double t, std::span<const double> y)>;

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

// Dormand-Prince 5(4) embedded pair with FSAL and an elementwise mixed error norm.
// Integrates from t0 to t1 (either direction) in place on y. Throws StiffnessError when
// the step size underflows or max_steps is exhausted, IntegrationError on non-finite state.
OdeStats integrate_dopri5(const OdeRhs& rhs, double t0, double t1, std::vector<double>& y,
                          const RkConfig& config, const OdeObserver& observer = {});

}  // namespace densemem
