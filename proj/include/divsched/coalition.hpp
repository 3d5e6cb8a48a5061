#pragma once

#include <functional>
#include <string>
#include <vector>

#include "divsched/metrics.hpp"
#include "divsched/rng.hpp"

namespace divsched {

/// Search limits for the coalition selectors.
struct CoalitionLimits {
  long long enumeration_limit = 2'000'000;  // max C(N, K) for exact enumeration
  int exact_shapley_limit = 12;             // max N for exact Shapley
};

/// C(n, k), saturating at a large sentinel instead of overflowing.
long long binomial(int n, int k);

/// Lexicographically next k-combination of {0..n-1}; returns false after the
/// last one. `c` must hold a valid combination (sorted ascending).
bool next_combination(std::vector<int>& c, int n);

/// The rank-th k-combination of {0..n-1} in lexicographic order.
std::vector<int> unrank_combination(long long rank, int n, int k);

/// Enumeration output: the winning coalition plus the z-score statistics of
/// the candidate population it was scored against (needed to compare other
/// coalitions in the same frame).
struct EnumerationResult {
  CoalitionValue best;
  NormalizationStats norm;
  long long candidates = 0;
};

/// Scores every size-k coalition of the snapshot's RSUs, z-normalizing each
/// component across that candidate population, and returns the maximizer.
/// Ties break toward the lexicographically smallest member list. `parallel`
/// enables the OpenMP kernel; results are bit-identical to the serial
/// reference either way. Throws std::length_error when C(N, k) exceeds
/// limits.enumeration_limit.
EnumerationResult enumerate_best_coalition_full(const IntervalSnapshot& snapshot, int k,
                                                const PolicyWeights& weights,
                                                const CoalitionLimits& limits = {},
                                                bool parallel = true);

/// Serial reference implementation kept for testing; identical contract.
EnumerationResult enumerate_best_coalition_serial(const IntervalSnapshot& snapshot, int k,
                                                  const PolicyWeights& weights,
                                                  const CoalitionLimits& limits = {});

inline CoalitionValue enumerate_best_coalition(const IntervalSnapshot& snapshot, int k,
                                               const PolicyWeights& weights,
                                               const CoalitionLimits& limits = {}) {
  return enumerate_best_coalition_full(snapshot, k, weights, limits).best;
}

/// Greedy builder for coalition sizes whose exact enumeration is too large:
/// seeds with the best size-M coalition (exhaustive when C(N, M) is within
/// the enumeration limit, otherwise the M best singleton scores), then
/// repeatedly adds the RSU with the largest marginal value until |S| = k.
/// Candidates at each step are z-normalized across that step's population.
/// Deterministic given the snapshot.
CoalitionValue greedy_coalition(const IntervalSnapshot& snapshot, int k,
                                const PolicyWeights& weights, const CoalitionLimits& limits = {});

enum class ShapleyMode { exact, sampled };

struct ShapleyResult {
  std::vector<double> phi;
  ShapleyMode mode = ShapleyMode::exact;
  int samples = 0;  // permutations drawn in sampled mode
};

/// Characteristic-function value used for Shapley ranking: the raw weighted
/// objective of a coalition, with infeasible coalitions (|S| < M) valued 0.
double shapley_coalition_worth(const std::vector<int>& members, const IntervalSnapshot& snapshot,
                               const PolicyWeights& weights);

/// Exact Shapley values of an arbitrary n-player set function (subset-weighted
/// form, v(empty) = 0 implied by the oracle).
std::vector<double> exact_shapley(int n,
                                  const std::function<double(const std::vector<int>&)>& value);

/// Monte-Carlo Shapley: average marginal contributions over `permutations`
/// uniformly random join orders.
std::vector<double> sampled_shapley(int n,
                                    const std::function<double(const std::vector<int>&)>& value,
                                    int permutations, Rng& rng);

/// Shapley ranking of the snapshot's RSUs under shapley_coalition_worth.
/// Exact mode requires N <= limits.exact_shapley_limit and throws a
/// std::length_error instructing sampled mode beyond it. Sampled mode
/// requires permutations >= 1 and an rng.
ShapleyResult shapley_ranking(const IntervalSnapshot& snapshot, const PolicyWeights& weights,
                              ShapleyMode mode, const CoalitionLimits& limits = {},
                              int permutations = 0, Rng* rng = nullptr);

}  // namespace divsched
