#include "divsched/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace divsched {

void PolicyWeights::validate() const {
  if (delay < 0.0 || throughput < 0.0 || fairness < 0.0) {
    throw std::invalid_argument("PolicyWeights: weights must be nonnegative");
  }
  if (!(delay + throughput + fairness > 0.0)) {
    throw std::invalid_argument("PolicyWeights: at least one weight must be positive");
  }
}

NormalizationStats NormalizationStats::from_components(
    std::span<const RawComponents> population) {
  NormalizationStats stats;
  const auto n = population.size();
  if (n == 0) return identity();

  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (const auto& p : population) sum += p[c];
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (const auto& p : population) {
      const double d = p[c] - mean;
      sq += d * d;
    }
    stats.mean[c] = mean;
    stats.stddev[c] = std::sqrt(sq / static_cast<double>(n));
  }
  return stats;
}

double jain_index(std::span<const double> x) {
  if (x.empty()) {
    throw std::domain_error("jain_index: empty vector");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : x) {
    if (v < 0.0) {
      throw std::domain_error("jain_index: entries must be nonnegative");
    }
    sum += v;
    sum_sq += v * v;
  }
  if (sum_sq == 0.0) return 0.0;
  return (sum * sum) / (static_cast<double>(x.size()) * sum_sq);
}

double delay_objective(std::span<const double> alpha, const ChannelState& state) {
  double alpha_sum = 0.0;
  double weighted_delay = 0.0;
  for (size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    alpha_sum += alpha[i];
    weighted_delay += alpha[i] / (state.delay_rate[i] * (1.0 - state.drop_rate[i]));
  }
  if (alpha_sum == 0.0) {
    throw std::domain_error("delay_objective: undefined when all attempt probabilities are 0");
  }
  return alpha_sum / weighted_delay;
}

double throughput_objective(std::span<const double> alpha, const ChannelState& state,
                            double channel_rate) {
  double total = 0.0;
  for (size_t i = 0; i < alpha.size(); ++i) {
    total += alpha[i] * channel_rate * (1.0 - state.drop_rate[i]);
  }
  return total;
}

double fairness_objective(const AccumulatorState& acc, std::span<const double> alpha,
                          const std::vector<std::vector<double>>& inventory_counts,
                          const ChannelState& state, double channel_rate) {
  const int num_classes = acc.num_classes();
  std::vector<double> hypothetical(acc.expected_counts.begin(), acc.expected_counts.end());
  for (size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    if (static_cast<int>(inventory_counts[i].size()) != num_classes) {
      throw std::invalid_argument("fairness_objective: inventory class count mismatch");
    }
    const double zeta = alpha[i] * channel_rate * (1.0 - state.drop_rate[i]);
    for (int j = 0; j < num_classes; ++j) {
      hypothetical[j] += inventory_counts[i][j] * zeta;
    }
  }
  return jain_index(hypothetical);
}

RawComponents coalition_components(std::span<const int> members,
                                   const IntervalSnapshot& snapshot) {
  const int k = static_cast<int>(members.size());
  if (k < snapshot.num_channels) {
    throw std::invalid_argument(
        "coalition_components: coalition smaller than the channel count is infeasible "
        "(equal split would need alpha > 1)");
  }
  const double share = static_cast<double>(snapshot.num_channels) / k;

  // Equal-split components expanded member-by-member, accumulating exactly
  // as the three objectives would on the full-length alpha vector.
  double alpha_sum = 0.0;
  double weighted_delay = 0.0;
  double throughput = 0.0;
  std::vector<double> hypothetical(snapshot.accumulator.expected_counts.begin(),
                                   snapshot.accumulator.expected_counts.end());
  for (int n : members) {
    const double beta = snapshot.channel.drop_rate[n];
    const double lambda = snapshot.channel.delay_rate[n];
    alpha_sum += share;
    weighted_delay += share / (lambda * (1.0 - beta));
    const double zeta = share * snapshot.channel_rate * (1.0 - beta);
    throughput += zeta;
    const auto& inv = snapshot.inventory_counts[n];
    for (size_t j = 0; j < hypothetical.size(); ++j) {
      hypothetical[j] += inv[j] * zeta;
    }
  }

  RawComponents raw;
  raw.inv_delay = alpha_sum / weighted_delay;
  raw.throughput = throughput;
  raw.fairness = jain_index(hypothetical);
  return raw;
}

double weighted_value(const RawComponents& raw, const PolicyWeights& weights,
                      const NormalizationStats& norm, std::array<double, 3>* normalized) {
  std::array<double, 3> z{norm.normalize(raw.inv_delay, 0), norm.normalize(raw.throughput, 1),
                          norm.normalize(raw.fairness, 2)};
  if (normalized) *normalized = z;
  return weights.delay * z[0] + weights.throughput * z[1] + weights.fairness * z[2];
}

CoalitionValue coalition_value(std::span<const int> members, const IntervalSnapshot& snapshot,
                               const PolicyWeights& weights, const NormalizationStats& norm) {
  weights.validate();
  CoalitionValue result;
  result.members.assign(members.begin(), members.end());
  result.raw = coalition_components(members, snapshot);
  result.value = weighted_value(result.raw, weights, norm, &result.normalized);
  return result;
}

}  // namespace divsched
