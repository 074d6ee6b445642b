#include "grasplab/expert.hpp"

#include <algorithm>
#include <stdexcept>

namespace grasplab::expert {

void ExpertParams::validate(const ParamBounds& b) const {
  if (gain < b.k_min || gain > b.k_max) {
    throw std::invalid_argument("controller gain outside bounds");
  }
  if (d_critical < b.dc_min || d_critical > b.dc_max) {
    throw std::invalid_argument("critical distance outside bounds");
  }
  if (!(0.0 <= h_open && h_open < h_closed && h_closed <= 1.0)) {
    throw std::invalid_argument("need 0 <= h_open < h_closed <= 1");
  }
}

double expert_action(double closure, double d_hat, const ExpertParams& p) {
  const double target = d_hat >= p.d_critical ? p.h_open : p.h_closed;
  return std::clamp(p.gain * (target - closure), -1.0, 1.0);
}

ExpertParams sample_params(std::mt19937_64& rng, const ParamBounds& b) {
  std::uniform_real_distribution<double> k_dist(b.k_min, b.k_max);
  std::uniform_real_distribution<double> dc_dist(b.dc_min, b.dc_max);
  ExpertParams p;
  p.gain = k_dist(rng);
  p.d_critical = dc_dist(rng);
  return p;
}

double ExpertPolicy::operator()(const env::StateVector& s) {
  const double d = (s.segment<3>(env::kHandPos) - s.segment<3>(env::kObjectPos)).norm();
  if (d0_ < 0.0) d0_ = std::max(d, 1e-9);
  return expert_action(s(env::kClosure), d / d0_, params_);
}

}  // namespace grasplab::expert
