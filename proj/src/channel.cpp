#include "divsched/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace divsched {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(std::string("ChannelConfig: ") + name +
                                " must be strictly positive");
  }
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::domain_error("drop rate beta must lie in (0, 1)");
  }
}

void check_domain(double beta, double lambda) {
  check_beta(beta);
  if (!(lambda > 0.0)) {
    throw std::domain_error("delay rate lambda must be strictly positive");
  }
}

}  // namespace

void ChannelConfig::validate() const {
  require_positive(beta_shape_a, "beta_shape_a");
  require_positive(beta_shape_b, "beta_shape_b");
  require_positive(gamma_shape, "gamma_shape");
  require_positive(gamma_scale, "gamma_scale");
  require_positive(channel_rate, "channel_rate");
  if (fixed_tx_delay < 0.0) {
    throw std::invalid_argument("ChannelConfig: fixed_tx_delay must be >= 0");
  }
}

ChannelState sample_channel_conditions(Rng& rng, const ChannelConfig& config, int n) {
  config.validate();
  if (n < 1) {
    throw std::invalid_argument("sample_channel_conditions: n must be >= 1");
  }

  ChannelState state;
  state.drop_rate.reserve(n);
  state.delay_rate.reserve(n);

  // Beta(a, b) as X / (X + Y) with X ~ Gamma(a, 1), Y ~ Gamma(b, 1).
  std::gamma_distribution<double> gamma_a(config.beta_shape_a, 1.0);
  std::gamma_distribution<double> gamma_b(config.beta_shape_b, 1.0);
  std::gamma_distribution<double> gamma_lambda(config.gamma_shape, config.gamma_scale);

  for (int i = 0; i < n; ++i) {
    const double x = gamma_a(rng);
    const double y = gamma_b(rng);
    const double sum = x + y;
    double beta = sum > 0.0 ? x / sum : 0.5;
    beta = std::clamp(beta, kRateEpsilon, 1.0 - kRateEpsilon);
    state.drop_rate.push_back(beta);

    const double lambda = std::max(gamma_lambda(rng), kRateEpsilon);
    state.delay_rate.push_back(lambda);
  }
  return state;
}

double expected_delay(double beta, double lambda, double fixed_tx_delay) {
  check_domain(beta, lambda);
  return (1.0 / lambda + fixed_tx_delay) / (1.0 - beta);
}

std::pair<int, double> sample_packet_service(Rng& rng, double beta, double lambda,
                                             double fixed_tx_delay) {
  check_domain(beta, lambda);
  std::exponential_distribution<double> attempt_delay(lambda);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int attempts = 0;
  double delay = 0.0;
  for (;;) {
    ++attempts;
    delay += attempt_delay(rng) + fixed_tx_delay;
    if (unit(rng) >= beta) {
      break;  // attempt succeeded with probability 1 - beta
    }
  }
  return {attempts, delay};
}

double effective_throughput(double alpha, double beta, double channel_rate) {
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
    throw std::domain_error("attempt probability alpha must lie in [0, 1]");
  }
  check_beta(beta);
  if (!(channel_rate > 0.0)) {
    throw std::domain_error("channel_rate must be strictly positive");
  }
  return alpha * channel_rate * (1.0 - beta);
}

}  // namespace divsched
