#include "densemem/schedule.hpp"

#include <cmath>
#include <sstream>

#include "densemem/error.hpp"

namespace densemem {

void VESchedule::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("VE schedule: sigma must be > 0");
  if (!(t_min > 0.0) || !(t_min < t_max) || !std::isfinite(t_max)) {
    throw InvalidArgument("VE schedule: need 0 < t_min < t_max");
  }
  if (steps < 2) throw InvalidArgument("VE schedule: steps must be >= 2");
}

std::vector<double> VESchedule::reverse_grid() const {
  validate();
  std::vector<double> times(steps + 1);
  const double span = t_max - t_min;
  for (std::size_t i = 0; i <= steps; ++i) {
    times[i] = t_max - span * static_cast<double>(i) / static_cast<double>(steps);
  }
  times[steps] = t_min;
  return times;
}

std::string VESchedule::id() const {
  std::ostringstream s;
  s << "ve:sigma=" << sigma << ",t_min=" << t_min << ",t_max=" << t_max << ",steps=" << steps;
  return s.str();
}

VPSchedule::VPSchedule(double beta_min, double beta_max, std::size_t T)
    : beta_min_(beta_min), beta_max_(beta_max), T_(T) {
  if (T_ < 2) throw InvalidArgument("VP schedule: T must be >= 2");
  if (!(beta_min_ > 0.0) || !(beta_max_ > beta_min_) || !(beta_max_ < 1.0)) {
    throw InvalidArgument("VP schedule: need 0 < beta_min < beta_max < 1");
  }
  beta_.resize(T_);
  alpha_bar_.resize(T_ + 1);
  alpha_bar_[0] = 1.0;
  for (std::size_t i = 0; i < T_; ++i) {
    beta_[i] = beta_min_ + (beta_max_ - beta_min_) * static_cast<double>(i) / static_cast<double>(T_ - 1);
    alpha_bar_[i + 1] = alpha_bar_[i] * (1.0 - beta_[i]);
  }
}

void VPSchedule::check_step(std::size_t step) const {
  if (step < 1 || step > T_) {
    throw InvalidArgument("VP step " + std::to_string(step) + " outside [1, " + std::to_string(T_) + "]");
  }
}

double VPSchedule::beta(std::size_t step) const {
  check_step(step);
  return beta_[step - 1];
}

double VPSchedule::alpha_bar(std::size_t step) const {
  if (step > T_) check_step(step);
  return alpha_bar_[step];
}

std::string VPSchedule::id() const {
  std::ostringstream s;
  s << "vp:beta_min=" << beta_min_ << ",beta_max=" << beta_max_ << ",T=" << T_;
  return s.str();
}

}  // namespace densemem
