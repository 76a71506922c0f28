#include <doctest.h>

#include <cmath>
#include <random>

#include "densemem/error.hpp"
#include "densemem/samplers.hpp"
#include "helpers.hpp"

using namespace densemem;

TEST_CASE("schedules") {
  VESchedule ve{1.0, 1e-5, 1.0, 10};
  const auto grid = ve.reverse_grid();
  REQUIRE(grid.size() == 11);
  CHECK(grid.front() == 1.0);
  CHECK(grid.back() == 1e-5);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
  CHECK_THROWS_AS((VESchedule{1.0, 0.0, 1.0, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((VESchedule{-1.0, 1e-5, 1.0, 10}.validate()), InvalidArgument);
  CHECK_THROWS_AS((VESchedule{1.0, 0.5, 0.4, 10}.validate()), InvalidArgument);

  VPSchedule vp;
  CHECK(vp.beta(1) == doctest::Approx(1e-4));
  CHECK(vp.beta(1000) == doctest::Approx(2e-2));
  CHECK(vp.alpha_bar(0) == 1.0);
  double prod = 1.0;
  for (std::size_t i = 1; i <= 1000; ++i) prod *= 1.0 - vp.beta(i);
  CHECK(vp.alpha_bar(1000) == doctest::Approx(prod).epsilon(1e-12));
  CHECK_THROWS_AS(vp.check_step(0), InvalidArgument);
  CHECK_THROWS_AS(VPSchedule(0.1, 0.01, 10), InvalidArgument);
}

TEST_CASE("forward perturbation statistics") {
  const std::vector<double> x0{0.5, -1.0};
  VESchedule ve;
  ZeroNoise zero;
  CHECK(forward_perturb_ve(x0, 0.3, ve, zero) == x0);
  Rng rng(5);
  double sum = 0, sum2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto x = forward_perturb_ve(x0, 0.25, ve, rng);
    sum += x[0];
    sum2 += (x[0] - 0.5) * (x[0] - 0.5);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.03));
  CHECK(sum2 / n == doctest::Approx(0.25).epsilon(0.05));
  CHECK_THROWS_AS(forward_perturb_ve(x0, 2.0, ve, zero), InvalidArgument);

  VPSchedule vp;
  const auto y = forward_perturb_vp(x0, 500, vp, zero);
  CHECK(y[0] == doctest::Approx(std::sqrt(vp.alpha_bar(500)) * 0.5));
}

TEST_CASE("noise-free Euler-Maruyama is the Euler ODE with the full reverse drift") {
  std::mt19937_64 gen(31);
  const auto p = test::random_patterns(gen, 5, 2);
  const auto score = make_ve_score(p, 0.8);
  VESchedule ve{0.8, 1e-3, 1.0, 200};
  const auto x = test::random_vector(gen, 2, 0.8);
  ZeroNoise zero;
  const auto sde = reverse_sde_euler_maruyama(score, x, ve, zero);
  const auto ode = pf_ode_euler(score, x, ve, Direction::kBackward, 1.0);
  REQUIRE(sde.size() == ode.size());
  CHECK(sde.states == ode.states);
  CHECK(sde.times == ode.times);
}

TEST_CASE("PF-ODE for one pattern follows the closed-form flow") {
  // Score -(x - xi)/(sigma^2 t) gives dx/dt = (x - xi)/(2t), so x - xi scales as sqrt(t).
  PatternSet one({0.3, -0.2}, 1, 2);
  VESchedule ve{1.5, 1e-3, 1.0, 100};
  const auto score = make_ve_score(one, ve.sigma);
  const std::vector<double> x_init{1.3, 0.9};
  const auto back = pf_ode_integrate(score, x_init, ve, Direction::kBackward, {1e-12, 1e-10});
  const double shrink = std::sqrt(ve.t_min / ve.t_max);
  CHECK(back.times.back() == ve.t_min);
  CHECK(back.final_state()[0] == doctest::Approx(0.3 + (1.3 - 0.3) * shrink).epsilon(1e-8));
  CHECK(back.final_state()[1] == doctest::Approx(-0.2 + (0.9 + 0.2) * shrink).epsilon(1e-8));
  const auto fwd = pf_ode_integrate(score, back.final_state(), ve, Direction::kForward, {1e-12, 1e-10});
  CHECK(fwd.final_state()[0] == doctest::Approx(1.3).epsilon(1e-7));
  CHECK(fwd.final_state()[1] == doctest::Approx(0.9).epsilon(1e-7));
}

TEST_CASE("samplers surface divergence with the step index") {
  VESchedule ve{1.0, 1e-3, 1.0, 50};
  ScoreFn bad = [](std::span<const double> x, double t) {
    std::vector<double> s(x.size(), t < 0.5 ? NAN : 0.0);
    return s;
  };
  ZeroNoise zero;
  try {
    reverse_sde_euler_maruyama(bad, std::vector<double>{0, 0}, ve, zero);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.step() == 26);
  }
}

TEST_CASE("DDIM timesteps") {
  const auto idx = ddim_timesteps(800, 10);
  REQUIRE(idx.size() == 11);
  CHECK(idx.front() == 800);
  CHECK(idx.back() == 0);
  for (std::size_t j = 1; j < idx.size(); ++j) CHECK(idx[j] < idx[j - 1]);
  CHECK(ddim_timesteps(3, 10) == std::vector<std::size_t>{3, 2, 1, 0});
  CHECK(ddim_timesteps(7, 2) == std::vector<std::size_t>{7, 4, 0});
  CHECK_THROWS_AS(ddim_timesteps(7, 0), InvalidArgument);
}

TEST_CASE("DDIM with the exact single-pattern score recovers the pattern from any step") {
  PatternSet one({0.6, -0.8}, 1, 2);
  VPSchedule vp;
  const auto score = make_vp_score(one, vp);
  Rng rng(8);
  for (std::size_t step : {1u, 10u, 200u, 800u, 1000u}) {
    const auto xt = forward_perturb_vp(one.row(0), step, vp, rng);
    const auto x0 = ddim_denoise(score, xt, step, 10, vp);
    CAPTURE(step);
    CHECK(test::distance(x0, one.row(0)) < 1e-9);
  }
}

TEST_CASE("synthetic sets are deterministic and thread-order independent") {
  std::mt19937_64 gen(41);
  const auto p = test::random_patterns(gen, 6, 2);
  VESchedule ve{1.0, 1e-5, 1.0, 100};
  const auto a = generate_synthetic_set(p, ve, std::nullopt, 99);
  const auto b = generate_synthetic_set(p, ve, std::nullopt, 99);
  CHECK(a.m() == 24);
  CHECK(a == b);
  CHECK(a.source_k() == 6);
  CHECK(a.schedule_id() == ve.id());
  // Run i is a function of (seed, i) alone, so a shorter set is a prefix.
  const auto c = generate_synthetic_set(p, ve, 10, 99);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::equal(c.row(i).begin(), c.row(i).end(), a.row(i).begin()));
  const auto d = generate_synthetic_set(p, ve, 10, 100);
  CHECK_FALSE(c == d);
}

TEST_CASE("reverse SDE from one pattern concentrates on it") {
  PatternSet one({1.0, 0.0}, 1, 2);
  VESchedule ve{0.5, 1e-5, 1.0, 1000};
  const auto s = generate_synthetic_set(one, ve, 200, 3);
  for (std::size_t i = 0; i < s.m(); ++i) CHECK(test::distance(s.row(i), one.row(0)) < 0.1);
}

TEST_CASE("forward perturbation at t_min has the kernel width") {
  VESchedule ve;
  Rng rng(12);
  const std::vector<double> x0{0.0, 0.0};
  double ss = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto x = forward_perturb_ve(x0, ve.t_min, ve, rng);
    ss += x[0] * x[0];
  }
  CHECK(std::sqrt(ss / n) == doctest::Approx(std::sqrt(1e-5)).epsilon(0.05));
  Rng a(3), b(3);
  CHECK(forward_perturb_ve(x0, 0.5, ve, a) == forward_perturb_ve(x0, 0.5, ve, b));
}

TEST_CASE("VP forward mean shrinks by sqrt(abar)") {
  VPSchedule vp;
  const std::vector<double> x0{2.0, -1.0};
  Rng rng(13);
  const std::size_t step = 400;
  const int n = 10000;
  double m0 = 0, m1 = 0;
  for (int i = 0; i < n; ++i) {
    const auto x = forward_perturb_vp(x0, step, vp, rng);
    m0 += x[0];
    m1 += x[1];
  }
  const double expected = std::sqrt(vp.alpha_bar(step)) * std::hypot(2.0, 1.0);
  const double se = std::sqrt((1 - vp.alpha_bar(step)) * 2 / n);
  CHECK(std::abs(std::hypot(m0 / n, m1 / n) - expected) <= 3 * se);
}

TEST_CASE("degenerate scores leave states unchanged") {
  VESchedule ve{1.0, 1e-3, 1.0, 50};
  ScoreFn zero = [](std::span<const double> x, double) { return std::vector<double>(x.size(), 0.0); };
  ZeroNoise noise;
  const std::vector<double> x{0.3, -0.4};
  CHECK(reverse_sde_euler_maruyama(zero, x, ve, noise).final_state()[0] == 0.3);
  const auto ode = pf_ode_integrate(zero, x, ve, Direction::kBackward);
  CHECK(ode.final_state()[0] == 0.3);
  CHECK(ode.final_state()[1] == -0.4);
}

TEST_CASE("reverse SDE for one pattern at the origin") {
  PatternSet origin({0.0, 0.0}, 1, 2);
  VESchedule ve;
  const auto s = generate_synthetic_set(origin, ve, 512, 21);
  double mx = 0, my = 0, worst = 0;
  for (std::size_t i = 0; i < s.m(); ++i) {
    mx += s.row(i)[0];
    my += s.row(i)[1];
    worst = std::max(worst, test::norm(s.row(i)));
  }
  CHECK(std::hypot(mx, my) / 512 < 0.02);
  // The last Euler-Maruyama step injects sigma sqrt(dt) noise, which dominates sigma sqrt(t_min).
  const double last_dt = (ve.t_max - ve.t_min) / ve.steps;
  CHECK(worst < 5 * ve.sigma * std::sqrt(last_dt + ve.t_min));
}

TEST_CASE("two separated patterns capture every run") {
  PatternSet two({-1, 0, 1, 0}, 2, 2);
  VESchedule ve{0.25, 1e-5, 1.0, 1000};
  const auto s = generate_synthetic_set(two, ve, 256, 22);
  for (std::size_t i = 0; i < s.m(); ++i) {
    CHECK(std::min(test::distance(s.row(i), two.row(0)), test::distance(s.row(i), two.row(1))) < 0.05);
  }
}

TEST_CASE("DDIM edge cases") {
  PatternSet two({-1, 0, 1, 0}, 2, 2);
  VPSchedule vp;
  const auto score = make_vp_score(two, vp);
  Rng rng(23);
  const auto xt = forward_perturb_vp(two.row(1), 300, vp, rng);
  // One step is the direct x0 prediction from x_t.
  const auto one_shot = ddim_denoise(score, xt, 300, 1, vp);
  const auto s = score(xt, 300);
  const double ab = vp.alpha_bar(300);
  CHECK(one_shot[0] == doctest::Approx((xt[0] + (1 - ab) * s[0]) / std::sqrt(ab)).epsilon(1e-13));
  ZeroNoise zero;
  const auto x_small = forward_perturb_vp(two.row(1), 5, vp, zero);
  CHECK(test::distance(ddim_denoise(score, x_small, 5, 10, vp), two.row(1)) < 1e-6);
}
