#pragma once

#include <utility>
#include <vector>

#include "divsched/rng.hpp"

namespace divsched {

/// Lower clamp for rates and drop probabilities; drop rates are also clamped
/// to 1 - kRateEpsilon from above so expected delays stay finite.
inline constexpr double kRateEpsilon = 1e-6;

/// Distribution parameters for per-interval link conditions.
///
/// Per-RSU drop rates are Beta(beta_shape_a, beta_shape_b) draws; per-RSU
/// delay rates are Gamma(gamma_shape, gamma_scale) draws. Time is measured in
/// timeslots and channel_rate defaults to one packet per slot, so per-slot
/// goodput equals alpha * (1 - beta). fixed_tx_delay is an optional constant
/// per-attempt transmission delay (L / bw expressed in slots); packet_length
/// and bandwidth are kept for documentation only and are not used in any
/// formula directly.
struct ChannelConfig {
  double beta_shape_a = 2.0;
  double beta_shape_b = 5.0;
  double gamma_shape = 2.0;
  double gamma_scale = 0.75;
  double channel_rate = 1.0;
  double fixed_tx_delay = 0.0;
  double packet_length_bits = 0.0;
  double bandwidth_hz = 0.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Per-interval channel conditions for all RSUs.
struct ChannelState {
  std::vector<double> drop_rate;   // beta_i, clamped to (0, 1)
  std::vector<double> delay_rate;  // lambda_i > 0; mean per-attempt delay 1/lambda_i
  int interval = 0;

  int size() const { return static_cast<int>(drop_rate.size()); }
};

/// Outcome of one fully-served packet.
struct PacketRecord {
  int rsu = 0;
  int attempts = 0;        // total attempts including the successful one
  double delay = 0.0;      // end-to-end delay: sum of per-attempt delays
  int class_label = -1;
  int first_interval = 0;  // interval of the first attempt
};

/// Draws n independent (beta_i, lambda_i) pairs. Identical seeds give
/// identical draws.
ChannelState sample_channel_conditions(Rng& rng, const ChannelConfig& config, int n);

/// Expected end-to-end delay of one successfully delivered packet:
/// (1/lambda + fixed_tx_delay) / (1 - beta). Geometric retransmissions with
/// success probability 1 - beta multiply the per-attempt mean by 1/(1-beta).
double expected_delay(double beta, double lambda, double fixed_tx_delay = 0.0);

/// Samples one packet service: attempt count R with P(R=r) = beta^(r-1)(1-beta)
/// and total delay = sum of R Exponential(lambda) draws + R * fixed_tx_delay.
/// Returns (attempts, delay).
std::pair<int, double> sample_packet_service(Rng& rng, double beta, double lambda,
                                             double fixed_tx_delay = 0.0);

/// Retransmission-discounted delivery rate: alpha * channel_rate * (1 - beta).
double effective_throughput(double alpha, double beta, double channel_rate);

}  // namespace divsched
