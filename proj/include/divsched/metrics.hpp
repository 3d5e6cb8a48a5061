#pragma once

#include <array>
#include <span>
#include <vector>

#include "divsched/channel.hpp"

namespace divsched {

/// Nonnegative weights on the three objective components (inverse delay,
/// throughput, class fairness). Scaling all three by a common positive factor
/// never changes which coalition wins.
struct PolicyWeights {
  double delay = 1.0 / 3.0;
  double throughput = 1.0 / 3.0;
  double fairness = 1.0 / 3.0;

  void validate() const;
};

/// Running received-class ledgers. expected_counts is the planner's ledger:
/// each interval adds inventory_count * effective_throughput per class (its
/// unit is count x rate; the units cancel inside Jain's ratio).
/// delivered_counts is the realized ledger of integer samples delivered.
struct AccumulatorState {
  std::vector<double> expected_counts;
  std::vector<long long> delivered_counts;
  int interval = 0;

  explicit AccumulatorState(int num_classes = 0)
      : expected_counts(num_classes, 0.0), delivered_counts(num_classes, 0) {}

  int num_classes() const { return static_cast<int>(expected_counts.size()); }
};

/// Immutable view of one interval that scheduling decisions are made against.
struct IntervalSnapshot {
  ChannelState channel;
  AccumulatorState accumulator;
  std::vector<std::vector<double>> inventory_counts;  // [rsu][class] remaining stock
  double channel_rate = 1.0;
  int num_channels = 1;  // M

  int num_rsus() const { return channel.size(); }
  int num_classes() const { return accumulator.num_classes(); }
};

/// Raw objective components of one candidate coalition.
struct RawComponents {
  double inv_delay = 0.0;
  double throughput = 0.0;
  double fairness = 0.0;

  double operator[](int i) const {
    return i == 0 ? inv_delay : (i == 1 ? throughput : fairness);
  }
};

/// Per-component z-score statistics over the candidate population evaluated
/// in one interval. A component whose population is constant (stddev == 0)
/// normalizes to 0. identity() leaves components raw.
struct NormalizationStats {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> stddev{1.0, 1.0, 1.0};

  static NormalizationStats identity() { return {}; }
  static NormalizationStats from_components(std::span<const RawComponents> population);

  double normalize(double raw, int component) const {
    if (stddev[component] == 0.0) return 0.0;
    return (raw - mean[component]) / stddev[component];
  }
};

/// A scored coalition: members, raw and normalized components, and the
/// weighted scalar value.
struct CoalitionValue {
  std::vector<int> members;  // sorted, unique
  RawComponents raw;
  std::array<double, 3> normalized{0.0, 0.0, 0.0};
  double value = 0.0;
};

/// Jain's fairness index (sum x)^2 / (n * sum x^2), in [1/n, 1] for any
/// nonnegative vector with a positive entry; defined as 0 for the all-zero
/// vector. Throws std::domain_error on an empty vector or negative entries.
double jain_index(std::span<const double> x);

/// Inverse of the attempt-weighted mean per-packet delay:
/// sum(alpha) / sum(alpha_i * E[D_i]). Throws std::domain_error if all
/// alpha_i are zero (the objective is undefined for a silent system).
double delay_objective(std::span<const double> alpha, const ChannelState& state);

/// Sum of per-RSU effective throughputs: sum alpha_i * rate * (1 - beta_i).
double throughput_objective(std::span<const double> alpha, const ChannelState& state,
                            double channel_rate);

/// Jain's index of the hypothetical received-class counts
/// c_hat[j] = expected_counts[j] + sum_i inventory[i][j] * zeta_i(alpha_i).
double fairness_objective(const AccumulatorState& acc, std::span<const double> alpha,
                          const std::vector<std::vector<double>>& inventory_counts,
                          const ChannelState& state, double channel_rate);

/// Raw components of a coalition under the equal split alpha_n = M / |S|.
/// Throws if |S| < M (alpha would exceed 1).
RawComponents coalition_components(std::span<const int> members,
                                   const IntervalSnapshot& snapshot);

/// Scores a coalition: equal-split alpha, raw components, normalization by
/// `norm`, weighted sum.
CoalitionValue coalition_value(std::span<const int> members, const IntervalSnapshot& snapshot,
                               const PolicyWeights& weights, const NormalizationStats& norm);

/// Weighted sum of normalized components; shared by every scoring path.
double weighted_value(const RawComponents& raw, const PolicyWeights& weights,
                      const NormalizationStats& norm, std::array<double, 3>* normalized = nullptr);

}  // namespace divsched
