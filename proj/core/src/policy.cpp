#include "grasplab/policy.hpp"

#include <cmath>

namespace grasplab::learn {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2*pi)
}

GaussianPolicy make_gaussian_policy(int state_dim, int hidden, std::mt19937_64& rng) {
  GaussianPolicy p;
  p.net = Mlp({state_dim, hidden, hidden, 2}, rng);
  return p;
}

double GaussianPolicy::act_deterministic(const VectorXd& s) const {
  const VectorXd out = net.forward1(s);
  return std::tanh(out(0));
}

double GaussianPolicy::act_sample(const VectorXd& s, std::mt19937_64& rng) const {
  const VectorXd out = net.forward1(s);
  const double log_std = std::clamp(out(1), log_std_min, log_std_max);
  std::normal_distribution<double> noise(0.0, 1.0);
  return std::tanh(out(0) + std::exp(log_std) * noise(rng));
}

PolicySampleBatch sample_policy_batch(const GaussianPolicy& policy, const MatrixXd& states,
                                      const VectorXd& eps) {
  PolicySampleBatch out;
  out.head = policy.net.forward(states, &out.cache);
  const Eigen::Index n = states.rows();
  out.mean = out.head.col(0);
  out.log_std = out.head.col(1).cwiseMax(policy.log_std_min).cwiseMin(policy.log_std_max);
  out.sigma = out.log_std.array().exp();
  out.eps = eps;
  out.pre_tanh = out.mean + out.sigma.cwiseProduct(eps);
  out.action = out.pre_tanh.array().tanh();
  out.log_prob.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = out.action(i);
    // log N(u; mean, sigma) with u on the reparameterized path, minus the
    // tanh volume correction log(1 - tanh(u)^2 + eps).
    out.log_prob(i) = -kHalfLog2Pi - out.log_std(i) - 0.5 * eps(i) * eps(i) -
                      std::log(1.0 - t * t + kTanhCorrectionEps);
  }
  return out;
}

void policy_backward(const GaussianPolicy& policy, const PolicySampleBatch& sample,
                     const VectorXd& d_logprob, const VectorXd& d_action, MlpGrads* grads) {
  const Eigen::Index n = sample.action.size();
  MatrixXd d_head = MatrixXd::Zero(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = sample.action(i);
    const double dtdu = 1.0 - t * t;                       // d tanh(u) / du
    const double c = 1.0 - t * t + kTanhCorrectionEps;
    const double dlogp_du = 2.0 * t * dtdu / c;            // from -log(c)
    const double du_dmean = 1.0;
    const double du_dlogstd = sample.sigma(i) * sample.eps(i);

    // logprob depends on log_std directly (-1) and on u through the tanh
    // correction; the Gaussian exponent is constant along the
    // reparameterized path.
    const double dlogp_dmean = dlogp_du * du_dmean;
    const double dlogp_dlogstd = -1.0 + dlogp_du * du_dlogstd;
    const double da_dmean = dtdu * du_dmean;
    const double da_dlogstd = dtdu * du_dlogstd;

    d_head(i, 0) = d_logprob(i) * dlogp_dmean + d_action(i) * da_dmean;
    double g_logstd = d_logprob(i) * dlogp_dlogstd + d_action(i) * da_dlogstd;
    // Clamp on log_std: no gradient outside the active range.
    const double raw = sample.head(i, 1);
    if (raw <= policy.log_std_min || raw >= policy.log_std_max) g_logstd = 0.0;
    d_head(i, 1) = g_logstd;
  }
  policy.net.backward(sample.cache, d_head, grads);
}

}  // namespace grasplab::learn
