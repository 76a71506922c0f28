#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "densemem/basin.hpp"
#include "densemem/error.hpp"
#include "helpers.hpp"

using namespace densemem;

TEST_CASE("critical time grid") {
  CHECK(critical_time_grid(1000, 10).front() == 1);
  CHECK(critical_time_grid(1000, 10).back() == 989);
  const auto g = critical_time_grid(25, 10);
  CHECK(g == std::vector<std::size_t>{1, 11, 14});
  for (std::size_t i = 1; i < critical_time_grid(1000, 7).size(); ++i) {
    CHECK(critical_time_grid(1000, 7)[i] > critical_time_grid(1000, 7)[i - 1]);
  }
}

TEST_CASE("log-volume of an N-ball") {
  CHECK(log_volume(1.0, 2) == doctest::Approx(std::log(std::numbers::pi)).epsilon(1e-15));
  CHECK(log_volume(2.0, 3) == doctest::Approx(std::log(4.0 / 3.0 * std::numbers::pi * 8)).epsilon(1e-14));
  CHECK_THROWS_AS(log_volume(0.0, 5), InvalidArgument);
  std::mt19937_64 gen(71);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 1 + gen() % 1000;
    const double r = u(gen), c = u(gen);
    CHECK(std::abs(log_volume(c * r, n) - log_volume(r, n) - n * std::log(c)) <= 1e-10 * (1 + n * std::abs(std::log(c))));
  }
  // Finite for very high dimension, where the volume itself underflows.
  CHECK(std::isfinite(log_volume(1.0, 1'000'000)));
  CHECK_THROWS_AS(log_volume(-1.0, 2), InvalidArgument);
}

TEST_CASE("basin radius") {
  CHECK(basin_radius(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == 5.0);
}

TEST_CASE("infinite recovery tolerance runs every trial to the last grid point") {
  PatternSet p({1, 0, -1, 0}, 2, 2);
  const VPSchedule vp;
  CriticalTimeConfig cfg;
  cfg.delta_d = std::numeric_limits<double>::infinity();
  const auto r = critical_time(p.row(0), make_vp_score(p, vp), vp, cfg, 5);
  REQUIRE(r.t_c.size() == 20);
  for (auto t : r.t_c) CHECK(t == 1000 - 10 - 1);
  for (double rad : r.radii) CHECK(rad > 0.0);
  CHECK(r.mean_t_c() == 989.0);
}

TEST_CASE("zero recovery tolerance never succeeds") {
  PatternSet p({1, 0, -1, 0}, 2, 2);
  const VPSchedule vp;
  CriticalTimeConfig cfg;
  cfg.delta_d = 0.0;
  const auto r = critical_time(p.row(0), make_vp_score(p, vp), vp, cfg, 5);
  for (std::size_t m = 0; m < r.t_c.size(); ++m) {
    CHECK(r.t_c[m] == 0);
    CHECK(r.radii[m] == 0.0);
    CHECK(r.log_volume[m] == -std::numeric_limits<double>::infinity());
  }
  CHECK(r.mean_log_volume() == -std::numeric_limits<double>::infinity());
}

TEST_CASE("a lone pattern is always recovered") {
  // DDIM with one stored pattern maps every state to it exactly.
  PatternSet p({0.3, 0.4}, 1, 2);
  const VPSchedule vp;
  const auto r = critical_time(p.row(0), make_vp_score(p, vp), vp, {}, 1);
  for (auto t : r.t_c) CHECK(t == 989);
}

TEST_CASE("critical time is reproducible and seed dependent") {
  PatternSet p({1, 0, 0, 1, -1, 0}, 3, 2);
  const VPSchedule vp;
  CriticalTimeConfig cfg;
  cfg.delta_d = 0.1;
  const auto score = make_vp_score(p, vp);
  const auto a = critical_time(p.row(0), score, vp, cfg, 3);
  const auto b = critical_time(p.row(0), score, vp, cfg, 3);
  CHECK(a.t_c == b.t_c);
  CHECK(a.radii == b.radii);
  // Trials stop at their first failure, so t_c stays on the grid.
  const auto grid = critical_time_grid(1000, 10);
  for (auto t : a.t_c) CHECK((t == 0 || std::find(grid.begin(), grid.end(), t) != grid.end()));
  for (std::size_t m = 0; m < a.t_c.size(); ++m) {
    if (a.t_c[m] > 0) {
      CHECK(a.radii[m] == doctest::Approx(test::distance(p.row(0), {a.perturbed.data() + 2 * m, 2})));
    }
  }
}

TEST_CASE("config validation") {
  CriticalTimeConfig cfg;
  cfg.m_trials = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.delta_p = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.delta_d = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("basin sweep excludes small groups and respects the cap") {
  PatternSet p({1, 0, 0, 1, -1, 0, 0, -1}, 4, 2);
  const VPSchedule vp;
  std::vector<SampleGroup> groups;
  groups.push_back({"training", {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, true});
  groups.push_back({"memorized", {{1, 0}, {0, 1}, {-1, 0}}, false});
  groups.push_back({"spurious", {}, false});
  groups.push_back({"generalized", {{0.7, 0.7}}, false});
  BasinSweepConfig cfg;
  cfg.critical.m_trials = 4;
  cfg.per_type_cap = 2;
  cfg.min_group_fraction = 0.1;  // of 16 synthetic samples: groups below 1.6 are dropped
  const auto stats = sweep_basins(groups, 16, make_vp_score(p, vp), vp, cfg, 9);
  REQUIRE(stats.size() == 4);
  CHECK(stats[0].used == 2);
  CHECK(stats[0].available == 4);
  CHECK_FALSE(stats[0].excluded);
  CHECK(stats[1].used == 2);
  CHECK(stats[2].excluded);
  CHECK(stats[3].excluded);
  CHECK_FALSE(stats[3].reason.empty());
  CHECK(stats[0].results.size() == 2);
  // Equal inputs give equal statistics: training rows 0, 1 and memorized rows 0, 1 coincide
  // but draw from different seeds, so only the shapes are compared.
  CHECK(stats[1].results[0].t_c.size() == 4);
}

TEST_CASE("basin reference cases") {
  const std::vector<double> a{0.2, -0.1}, b{1.2, 2.3};
  CHECK(basin_radius(a, a) == 0.0);
  CHECK(basin_radius(a, b) == basin_radius(b, a));
  CHECK(log_volume(1.0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // 50-digit oracle for a high-dimensional ball.
  using Big = boost::multiprecision::cpp_dec_float_50;
  const Big half(1536);
  const Big oracle = half * log(boost::math::constants::pi<Big>()) - lgamma(half + 1) + Big(3072) * log(Big(10));
  CHECK(std::abs(log_volume(10.0, 3072) / static_cast<double>(oracle) - 1.0) <= 1e-9);

  // Single pattern with a tight tolerance: DDIM is exact, so every trial runs to the end.
  PatternSet one({0.5, 0.5}, 1, 2);
  const VPSchedule vp;
  CriticalTimeConfig cfg;
  cfg.delta_d = 0.05;
  const auto r = critical_time(one.row(0), make_vp_score(one, vp), vp, cfg, 2);
  for (auto t : r.t_c) CHECK(t >= 900);
}

TEST_CASE("basin group statistics") {
  const VPSchedule vp;
  // One isolated deep well at (3, 0) and a crowded ring of wells around the origin.
  std::vector<double> v{3.0, 0.0};
  for (int i = 0; i < 12; ++i) {
    v.push_back(0.15 * std::cos(i * std::numbers::pi / 6));
    v.push_back(0.15 * std::sin(i * std::numbers::pi / 6));
  }
  PatternSet p(v, 13, 2);
  std::vector<SampleGroup> groups;
  groups.push_back({"memorized", {{3.0, 0.0}}, true});
  groups.push_back({"generalized", {{0.0, 0.0}}, true});
  groups.push_back({"repeated", {{3.0, 0.0}, {3.0, 0.0}}, true});
  BasinSweepConfig cfg;
  cfg.critical.m_trials = 10;
  cfg.critical.delta_d = 0.05;
  const auto stats = sweep_basins(groups, 100, make_vp_score(p, vp), vp, cfg, 4);
  CHECK(stats[0].mean_log_volume >= stats[1].mean_log_volume);
  CHECK(stats[0].mean_t_c > stats[1].mean_t_c);
  // The same point drawn twice uses one seed per group position, so the two results match.
  CHECK(stats[2].used == 2);
}
