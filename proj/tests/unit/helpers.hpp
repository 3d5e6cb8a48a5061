#pragma once

#include <vector>

#include "divsched/metrics.hpp"
#include "divsched/rng.hpp"

namespace divsched::testing {

/// Random interval snapshot for property tests: Beta/Gamma channels, random
/// nonnegative inventories and accumulator.
inline IntervalSnapshot random_snapshot(int n, int classes, int channels, std::uint64_t seed,
                                        bool fill_accumulator = true) {
  Rng rng = make_rng(seed);
  ChannelConfig config;
  IntervalSnapshot snap;
  snap.channel = sample_channel_conditions(rng, config, n);
  snap.accumulator = AccumulatorState(classes);
  std::uniform_real_distribution<double> stock(0.0, 50.0);
  if (fill_accumulator) {
    for (auto& c : snap.accumulator.expected_counts) c = stock(rng);
  }
  snap.inventory_counts.assign(n, std::vector<double>(classes));
  for (auto& inv : snap.inventory_counts) {
    for (double& c : inv) c = stock(rng);
  }
  snap.channel_rate = 1.0;
  snap.num_channels = channels;
  return snap;
}

inline IntervalSnapshot fixed_snapshot(std::vector<double> beta, std::vector<double> lambda,
                                       std::vector<std::vector<double>> inventories, int channels,
                                       std::vector<double> expected_counts = {}) {
  IntervalSnapshot snap;
  snap.channel.drop_rate = std::move(beta);
  snap.channel.delay_rate = std::move(lambda);
  const int classes = inventories.empty() ? static_cast<int>(expected_counts.size())
                                          : static_cast<int>(inventories.front().size());
  snap.accumulator = AccumulatorState(classes);
  if (!expected_counts.empty()) snap.accumulator.expected_counts = std::move(expected_counts);
  snap.inventory_counts = std::move(inventories);
  snap.channel_rate = 1.0;
  snap.num_channels = channels;
  return snap;
}

}  // namespace divsched::testing
