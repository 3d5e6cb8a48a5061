#pragma once

#include <string>
#include <vector>

#include "divsched/coalition.hpp"
#include "divsched/metrics.hpp"

namespace divsched {

enum class PolicyKind {
  optimized_fair,    // coalition search with fairness weight > 0
  optimized_nofair,  // coalition search with fairness weight = 0
  uniform,           // all RSUs at alpha = M / N
  random,            // random size-K subset at alpha = M / K
  delay_min,         // K smallest expected delays at alpha = M / K
};

/// How active RSUs pick the samples their packets carry.
enum class SelectionMode {
  balanced_minmargin,  // class-quota water-filling + min-margin within class
  random_pool,         // uniform draws from the RSU's remaining pool
};

PolicyKind parse_policy_kind(const std::string& name);
std::string policy_kind_name(PolicyKind kind);
SelectionMode default_selection_mode(PolicyKind kind);

/// A fully resolved per-run policy. The optimized_nofair kind must carry a
/// zero fairness weight and optimized_fair a positive one.
struct PolicySpec {
  PolicyKind kind = PolicyKind::optimized_fair;
  PolicyWeights weights;
  int coalition_size = 0;  // K
  SelectionMode selection = SelectionMode::balanced_minmargin;

  void validate(int num_rsus, int num_channels) const;
};

struct IntervalPlan {
  std::vector<int> members;   // active RSUs, sorted
  std::vector<double> alpha;  // length N
};

/// Produces the interval's active set and attempt vector for the policy.
/// Optimized kinds route through exact enumeration when C(N, K) is within the
/// limit and the greedy builder otherwise.
IntervalPlan plan_interval(const PolicySpec& policy, const IntervalSnapshot& snapshot, Rng& rng,
                           const CoalitionLimits& limits = {});

}  // namespace divsched
