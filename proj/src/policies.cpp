#include "divsched/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace divsched {

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "fair" || name == "optimized_fair") return PolicyKind::optimized_fair;
  if (name == "nofair" || name == "optimized_nofair") return PolicyKind::optimized_nofair;
  if (name == "uniform") return PolicyKind::uniform;
  if (name == "random") return PolicyKind::random;
  if (name == "delaymin" || name == "delay_min") return PolicyKind::delay_min;
  throw std::invalid_argument("unknown policy '" + name +
                              "' (expected fair|nofair|uniform|random|delaymin)");
}

std::string policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::optimized_fair: return "fair";
    case PolicyKind::optimized_nofair: return "nofair";
    case PolicyKind::uniform: return "uniform";
    case PolicyKind::random: return "random";
    case PolicyKind::delay_min: return "delaymin";
  }
  return "unknown";
}

SelectionMode default_selection_mode(PolicyKind kind) {
  // Balanced quota + min-margin picking is part of the diversity-driven
  // policy; the baselines transmit samples drawn at random from their pools.
  return kind == PolicyKind::optimized_fair ? SelectionMode::balanced_minmargin
                                            : SelectionMode::random_pool;
}

void PolicySpec::validate(int num_rsus, int num_channels) const {
  weights.validate();
  if (kind == PolicyKind::optimized_fair && !(weights.fairness > 0.0)) {
    throw std::invalid_argument("optimized_fair requires a positive fairness weight");
  }
  if (kind == PolicyKind::optimized_nofair && weights.fairness != 0.0) {
    throw std::invalid_argument("optimized_nofair requires a zero fairness weight");
  }
  if (coalition_size < num_channels || coalition_size > num_rsus) {
    throw std::invalid_argument("coalition size K must satisfy M <= K <= N");
  }
}

namespace {

IntervalPlan equal_split_plan(std::vector<int> members, int num_rsus, int num_channels) {
  IntervalPlan plan;
  plan.alpha.assign(num_rsus, 0.0);
  const double share = static_cast<double>(num_channels) / members.size();
  for (int i : members) plan.alpha[i] = share;
  plan.members = std::move(members);
  return plan;
}

}  // namespace

IntervalPlan plan_interval(const PolicySpec& policy, const IntervalSnapshot& snapshot, Rng& rng,
                           const CoalitionLimits& limits) {
  const int n = snapshot.num_rsus();
  const int m = snapshot.num_channels;
  policy.validate(n, m);
  const int k = policy.coalition_size;

  switch (policy.kind) {
    case PolicyKind::uniform: {
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      return equal_split_plan(std::move(all), n, m);
    }

    case PolicyKind::random: {
      std::vector<int> ids(n);
      std::iota(ids.begin(), ids.end(), 0);
      for (int j = 0; j < k; ++j) {
        std::uniform_int_distribution<int> pick(j, n - 1);
        std::swap(ids[j], ids[pick(rng)]);
      }
      std::vector<int> members(ids.begin(), ids.begin() + k);
      std::sort(members.begin(), members.end());
      return equal_split_plan(std::move(members), n, m);
    }

    case PolicyKind::delay_min: {
      // Rank by expected end-to-end delay; near-equal delays (within 1e-12
      // relative) tie-break toward the smaller per-attempt mean 1/lambda,
      // then the smaller id.
      std::vector<double> exp_delay(n);
      for (int i = 0; i < n; ++i) {
        exp_delay[i] = expected_delay(snapshot.channel.drop_rate[i],
                                      snapshot.channel.delay_rate[i]);
      }
      std::vector<int> ids(n);
      std::iota(ids.begin(), ids.end(), 0);
      std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const double da = exp_delay[a], db = exp_delay[b];
        if (std::abs(da - db) > 1e-12 * std::max(da, db)) return da < db;
        if (snapshot.channel.delay_rate[a] != snapshot.channel.delay_rate[b]) {
          return snapshot.channel.delay_rate[a] > snapshot.channel.delay_rate[b];
        }
        return a < b;
      });
      std::vector<int> members(ids.begin(), ids.begin() + k);
      std::sort(members.begin(), members.end());
      return equal_split_plan(std::move(members), n, m);
    }

    case PolicyKind::optimized_fair:
    case PolicyKind::optimized_nofair: {
      CoalitionValue best;
      if (binomial(n, k) <= limits.enumeration_limit) {
        best = enumerate_best_coalition(snapshot, k, policy.weights, limits);
      } else {
        best = greedy_coalition(snapshot, k, policy.weights, limits);
      }
      return equal_split_plan(std::move(best.members), n, m);
    }
  }
  throw std::logic_error("plan_interval: unhandled policy kind");
}

}  // namespace divsched
