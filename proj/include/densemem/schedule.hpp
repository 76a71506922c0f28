#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace densemem {

// Smallest diffusion time used anywhere; the empirical score is singular at t = 0.
inline constexpr double kMinTime = 1e-5;

// Variance-exploding schedule dx = sigma dw on t in [t_min, t_max].
struct VESchedule {
  double sigma = 1.0;
  double t_min = kMinTime;
  double t_max = 1.0;
  std::size_t steps = 1000;

  void validate() const;
  // Uniform reverse grid t_max = times[0] > ... > times[steps] = t_min.
  std::vector<double> reverse_grid() const;
  std::string id() const;
};

// DDPM-style variance-preserving schedule with linear beta. Steps are 1-based:
// beta(1) = beta_min, beta(T) = beta_max, alpha_bar(t) = prod_{i<=t} (1 - beta(i)) and
// alpha_bar(0) = 1.
class VPSchedule {
 public:
  VPSchedule(double beta_min = 1e-4, double beta_max = 2e-2, std::size_t T = 1000);

  std::size_t T() const noexcept { return T_; }
  double beta_min() const noexcept { return beta_min_; }
  double beta_max() const noexcept { return beta_max_; }
  double beta(std::size_t step) const;
  double alpha_bar(std::size_t step) const;
  // Throws InvalidArgument unless 1 <= step <= T.
  void check_step(std::size_t step) const;
  std::string id() const;

 private:
  double beta_min_;
  double beta_max_;
  std::size_t T_;
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;
};

}  // namespace densemem
