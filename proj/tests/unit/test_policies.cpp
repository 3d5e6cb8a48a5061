#include <algorithm>
#include <numeric>
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "divsched/policies.hpp"
#include "helpers.hpp"

using namespace divsched;
using divsched::testing::fixed_snapshot;
using divsched::testing::random_snapshot;

namespace {

PolicySpec make_policy(PolicyKind kind, int k, PolicyWeights weights = {}) {
  PolicySpec spec;
  spec.kind = kind;
  spec.coalition_size = k;
  spec.weights = weights;
  if (kind == PolicyKind::optimized_nofair) spec.weights.fairness = 0.0;
  spec.selection = default_selection_mode(kind);
  return spec;
}

}  // namespace

TEST_CASE("policy names round-trip") {
  for (const char* name : {"fair", "nofair", "uniform", "random", "delaymin"}) {
    CHECK(policy_kind_name(parse_policy_kind(name)) == name);
  }
  CHECK_THROWS_AS(parse_policy_kind("greedy"), std::invalid_argument);
}

TEST_CASE("uniform policy activates everyone at M / N") {
  const auto snap = random_snapshot(10, 4, 5, 1);
  Rng rng = make_rng(2);
  const auto plan = plan_interval(make_policy(PolicyKind::uniform, 5), snap, rng);
  CHECK(plan.members.size() == 10);
  for (double a : plan.alpha) CHECK(a == doctest::Approx(0.5));
}

TEST_CASE("delay_min on the three-RSU reference channels picks RSU 2") {
  // Expected delays tie at 0.8547 for the first two; the smaller per-attempt
  // mean 1/lambda breaks the tie toward the second RSU (index 1).
  const auto snap = fixed_snapshot({0.1, 0.22, 0.44}, {1.3, 1.5, 1.1},
                                   {{1.0}, {1.0}, {1.0}}, 1);
  Rng rng = make_rng(3);
  const auto plan = plan_interval(make_policy(PolicyKind::delay_min, 1), snap, rng);
  CHECK(plan.members == std::vector<int>{1});
  CHECK(plan.alpha[1] == doctest::Approx(1.0));
}

TEST_CASE("delay_min ignores inventory contents") {
  auto snap = random_snapshot(8, 3, 3, 4);
  Rng rng_a = make_rng(5);
  const auto plan_a = plan_interval(make_policy(PolicyKind::delay_min, 4), snap, rng_a);
  for (auto& inv : snap.inventory_counts) inv.assign(3, 999.0);
  Rng rng_b = make_rng(5);
  const auto plan_b = plan_interval(make_policy(PolicyKind::delay_min, 4), snap, rng_b);
  CHECK(plan_a.members == plan_b.members);
}

TEST_CASE("random policy is deterministic under a fixed seed") {
  const auto snap = random_snapshot(10, 3, 4, 6);
  Rng rng_a = make_rng(7);
  Rng rng_b = make_rng(7);
  const auto a = plan_interval(make_policy(PolicyKind::random, 5), snap, rng_a);
  const auto b = plan_interval(make_policy(PolicyKind::random, 5), snap, rng_b);
  CHECK(a.members == b.members);
  CHECK(a.members.size() == 5);
  CHECK(std::is_sorted(a.members.begin(), a.members.end()));
}

TEST_CASE("every policy emits a feasible attempt vector") {
  const auto snap = random_snapshot(9, 4, 4, 8);
  Rng rng = make_rng(9);
  for (PolicyKind kind : {PolicyKind::optimized_fair, PolicyKind::optimized_nofair,
                          PolicyKind::uniform, PolicyKind::random, PolicyKind::delay_min}) {
    const auto plan = plan_interval(make_policy(kind, 5), snap, rng);
    double sum = 0.0;
    for (double a : plan.alpha) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      sum += a;
    }
    CHECK(sum <= 4.0 + 1e-9);
    for (int member : plan.members) CHECK(plan.alpha[member] > 0.0);
  }
}

TEST_CASE("optimized_nofair dominates sampled random coalitions in its own frame") {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    const auto snap = random_snapshot(9, 3, 3, seed);
    PolicyWeights weights{0.5, 0.5, 0.0};
    const auto frame = enumerate_best_coalition_full(snap, 4, weights);

    Rng rng = make_rng(seed + 100);
    for (int draw = 0; draw < 20; ++draw) {
      std::vector<int> ids(9);
      std::iota(ids.begin(), ids.end(), 0);
      for (int j = 0; j < 4; ++j) {
        std::uniform_int_distribution<int> pick(j, 8);
        std::swap(ids[j], ids[pick(rng)]);
      }
      std::vector<int> members(ids.begin(), ids.begin() + 4);
      std::sort(members.begin(), members.end());
      const auto value = coalition_value(members, snap, weights, frame.norm);
      CHECK(frame.best.value >= value.value - 1e-12);
    }
  }
}

TEST_CASE("optimized_nofair at K = N coincides with the uniform allocation") {
  const auto snap = random_snapshot(6, 3, 3, 30);
  Rng rng_a = make_rng(31);
  Rng rng_b = make_rng(31);
  const auto nofair = plan_interval(make_policy(PolicyKind::optimized_nofair, 6,
                                                PolicyWeights{0.5, 0.5, 0.0}),
                                    snap, rng_a);
  const auto uniform = plan_interval(make_policy(PolicyKind::uniform, 6), snap, rng_b);
  CHECK(nofair.members == uniform.members);
  CHECK(nofair.alpha == uniform.alpha);
}

TEST_CASE("policy spec validation") {
  PolicySpec fair = make_policy(PolicyKind::optimized_fair, 3);
  fair.weights.fairness = 0.0;
  CHECK_THROWS_AS(fair.validate(6, 2), std::invalid_argument);

  PolicySpec nofair = make_policy(PolicyKind::optimized_nofair, 3);
  nofair.weights.fairness = 0.5;
  CHECK_THROWS_AS(nofair.validate(6, 2), std::invalid_argument);

  PolicySpec small = make_policy(PolicyKind::random, 1);
  CHECK_THROWS_AS(small.validate(6, 2), std::invalid_argument);  // K < M

  PolicySpec good = make_policy(PolicyKind::random, 2);
  CHECK_NOTHROW(good.validate(6, 2));
}

TEST_CASE("selection defaults follow the policy kind") {
  CHECK(default_selection_mode(PolicyKind::optimized_fair) == SelectionMode::balanced_minmargin);
  CHECK(default_selection_mode(PolicyKind::optimized_nofair) == SelectionMode::random_pool);
  CHECK(default_selection_mode(PolicyKind::uniform) == SelectionMode::random_pool);
  CHECK(default_selection_mode(PolicyKind::random) == SelectionMode::random_pool);
  CHECK(default_selection_mode(PolicyKind::delay_min) == SelectionMode::random_pool);
}
