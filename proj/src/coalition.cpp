#include "divsched/coalition.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace divsched {

namespace {

constexpr long long kBinomialCap = std::numeric_limits<long long>::max() / 4;

// (value, rank) max with ties toward the smaller rank. Lexicographic
// combination rank order equals lexicographic member-list order, so this is
// the documented tie-break.
struct BestSlot {
  double value = -std::numeric_limits<double>::infinity();
  long long rank = -1;

  void consider(double v, long long r) {
    if (v > value || (v == value && (rank < 0 || r < rank))) {
      value = v;
      rank = r;
    }
  }
  void merge(const BestSlot& other) {
    if (other.rank >= 0) consider(other.value, other.rank);
  }
};

}  // namespace

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long result = 1;
  for (int i = 1; i <= k; ++i) {
    if (result > kBinomialCap / (n - k + i)) return kBinomialCap;
    result = result * (n - k + i) / i;
  }
  return result;
}

bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

std::vector<int> unrank_combination(long long rank, int n, int k) {
  std::vector<int> c(k);
  int value = 0;
  for (int pos = 0; pos < k; ++pos) {
    for (;;) {
      const long long block = binomial(n - value - 1, k - pos - 1);
      if (rank < block) break;
      rank -= block;
      ++value;
    }
    c[pos] = value++;
  }
  return c;
}

namespace {

// Pass 1 of enumeration: raw components of every size-k coalition in
// lexicographic rank order.
void compute_population_serial(const IntervalSnapshot& snapshot, int k, long long count,
                               std::vector<RawComponents>& out) {
  std::vector<int> combo(k);
  std::iota(combo.begin(), combo.end(), 0);
  for (long long rank = 0; rank < count; ++rank) {
    out[rank] = coalition_components(combo, snapshot);
    next_combination(combo, snapshot.num_rsus());
  }
}

void compute_population_parallel(const IntervalSnapshot& snapshot, int k, long long count,
                                 std::vector<RawComponents>& out) {
#ifdef _OPENMP
#pragma omp parallel
  {
    const int threads = omp_get_num_threads();
    const int tid = omp_get_thread_num();
    const long long chunk = (count + threads - 1) / threads;
    const long long begin = std::min<long long>(count, chunk * tid);
    const long long end = std::min<long long>(count, begin + chunk);
    if (begin < end) {
      std::vector<int> combo = unrank_combination(begin, snapshot.num_rsus(), k);
      for (long long rank = begin; rank < end; ++rank) {
        out[rank] = coalition_components(combo, snapshot);
        next_combination(combo, snapshot.num_rsus());
      }
    }
  }
#else
  compute_population_serial(snapshot, k, count, out);
#endif
}

EnumerationResult enumerate_impl(const IntervalSnapshot& snapshot, int k,
                                 const PolicyWeights& weights, const CoalitionLimits& limits,
                                 bool parallel) {
  weights.validate();
  const int n = snapshot.num_rsus();
  if (k < snapshot.num_channels || k > n) {
    throw std::invalid_argument("enumerate_best_coalition: need M <= K <= N");
  }
  const long long count = binomial(n, k);
  if (count > limits.enumeration_limit) {
    throw std::length_error(
        "enumerate_best_coalition: C(N, K) exceeds the enumeration limit; use "
        "greedy_coalition");
  }

  std::vector<RawComponents> population(count);
  if (parallel) {
    compute_population_parallel(snapshot, k, count, population);
  } else {
    compute_population_serial(snapshot, k, count, population);
  }

  // Stats are accumulated in rank order from the stored population, so the
  // serial and parallel kernels produce bit-identical results.
  const NormalizationStats norm = NormalizationStats::from_components(population);

  BestSlot best;
  for (long long rank = 0; rank < count; ++rank) {
    best.consider(weighted_value(population[rank], weights, norm), rank);
  }

  EnumerationResult result;
  result.norm = norm;
  result.candidates = count;
  const std::vector<int> members = unrank_combination(best.rank, n, k);
  result.best = coalition_value(members, snapshot, weights, norm);
  return result;
}

}  // namespace

EnumerationResult enumerate_best_coalition_full(const IntervalSnapshot& snapshot, int k,
                                                const PolicyWeights& weights,
                                                const CoalitionLimits& limits, bool parallel) {
  return enumerate_impl(snapshot, k, weights, limits, parallel);
}

EnumerationResult enumerate_best_coalition_serial(const IntervalSnapshot& snapshot, int k,
                                                  const PolicyWeights& weights,
                                                  const CoalitionLimits& limits) {
  return enumerate_impl(snapshot, k, weights, limits, /*parallel=*/false);
}

CoalitionValue greedy_coalition(const IntervalSnapshot& snapshot, int k,
                                const PolicyWeights& weights, const CoalitionLimits& limits) {
  weights.validate();
  const int n = snapshot.num_rsus();
  const int m = snapshot.num_channels;
  if (k < m || k > n) {
    throw std::invalid_argument("greedy_coalition: need M <= K <= N");
  }

  std::vector<int> current;
  NormalizationStats last_norm = NormalizationStats::identity();

  if (binomial(n, m) <= limits.enumeration_limit) {
    const EnumerationResult seed = enumerate_best_coalition_full(snapshot, m, weights, limits);
    current = seed.best.members;
    last_norm = seed.norm;
  } else {
    // Seed pool fallback: rank RSUs by their singleton components at full
    // attempt probability, z-normalized across the N singletons.
    std::vector<RawComponents> singles(n);
    IntervalSnapshot single_view = snapshot;
    single_view.num_channels = 1;  // alpha = 1 per singleton
    for (int i = 0; i < n; ++i) {
      const std::vector<int> one{i};
      singles[i] = coalition_components(one, single_view);
    }
    const NormalizationStats norm = NormalizationStats::from_components(singles);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return weighted_value(singles[a], weights, norm) >
             weighted_value(singles[b], weights, norm);
    });
    current.assign(order.begin(), order.begin() + m);
    std::sort(current.begin(), current.end());
    last_norm = norm;
  }

  // Marginal growth: v(S + n) - v(S) shares the v(S) term across candidates,
  // so the argmax of the extension value decides each step. Extensions are
  // scored in the seed population's normalization frame; per-step re-scaling
  // would let a nearly-constant component blow up to unit variance and
  // derail the search.
  std::vector<int> candidate;
  while (static_cast<int>(current.size()) < k) {
    std::vector<int> pool;
    for (int i = 0; i < n; ++i) {
      if (!std::binary_search(current.begin(), current.end(), i)) pool.push_back(i);
    }
    size_t best_idx = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (size_t idx = 0; idx < pool.size(); ++idx) {
      candidate = current;
      candidate.insert(std::upper_bound(candidate.begin(), candidate.end(), pool[idx]),
                       pool[idx]);
      const double v =
          weighted_value(coalition_components(candidate, snapshot), weights, last_norm);
      if (v > best_value) {
        best_value = v;
        best_idx = idx;
      }
    }
    current.insert(std::upper_bound(current.begin(), current.end(), pool[best_idx]),
                   pool[best_idx]);
  }

  return coalition_value(current, snapshot, weights, last_norm);
}

double shapley_coalition_worth(const std::vector<int>& members, const IntervalSnapshot& snapshot,
                               const PolicyWeights& weights) {
  if (static_cast<int>(members.size()) < snapshot.num_channels) return 0.0;
  const RawComponents raw = coalition_components(members, snapshot);
  return weighted_value(raw, weights, NormalizationStats::identity());
}

std::vector<double> exact_shapley(int n,
                                  const std::function<double(const std::vector<int>&)>& value) {
  if (n < 1 || n > 20) {
    throw std::invalid_argument("exact_shapley: player count out of range");
  }
  const std::uint32_t full = 1u << n;

  std::vector<double> worth(full, 0.0);
  std::vector<int> members;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    members.clear();
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) members.push_back(i);
    }
    worth[mask] = value(members);
  }

  // weight(s) = s! (n-1-s)! / n! for the subset-sum form.
  std::vector<double> weight(n, 0.0);
  double n_fact = 1.0;
  for (int i = 2; i <= n; ++i) n_fact *= i;
  for (int s = 0; s < n; ++s) {
    double s_fact = 1.0;
    for (int i = 2; i <= s; ++i) s_fact *= i;
    double r_fact = 1.0;
    for (int i = 2; i <= n - 1 - s; ++i) r_fact *= i;
    weight[s] = s_fact * r_fact / n_fact;
  }

  std::vector<double> phi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      if (mask & bit) continue;
      phi[i] += weight[std::popcount(mask)] * (worth[mask | bit] - worth[mask]);
    }
  }
  return phi;
}

std::vector<double> sampled_shapley(int n,
                                    const std::function<double(const std::vector<int>&)>& value,
                                    int permutations, Rng& rng) {
  if (permutations < 1) {
    throw std::invalid_argument("sampled_shapley: need at least one permutation");
  }
  std::vector<double> phi(n, 0.0);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> prefix;
  for (int p = 0; p < permutations; ++p) {
    std::shuffle(order.begin(), order.end(), rng);
    prefix.clear();
    double prev = 0.0;  // v(empty) = 0
    for (int player : order) {
      prefix.insert(std::upper_bound(prefix.begin(), prefix.end(), player), player);
      const double cur = value(prefix);
      phi[player] += cur - prev;
      prev = cur;
    }
  }
  for (double& v : phi) v /= permutations;
  return phi;
}

ShapleyResult shapley_ranking(const IntervalSnapshot& snapshot, const PolicyWeights& weights,
                              ShapleyMode mode, const CoalitionLimits& limits, int permutations,
                              Rng* rng) {
  weights.validate();
  const int n = snapshot.num_rsus();
  const auto value = [&](const std::vector<int>& members) {
    return shapley_coalition_worth(members, snapshot, weights);
  };

  ShapleyResult result;
  result.mode = mode;
  if (mode == ShapleyMode::exact) {
    if (n > limits.exact_shapley_limit) {
      throw std::length_error(
          "shapley_ranking: N exceeds the exact-mode limit; use sampled mode");
    }
    result.phi = exact_shapley(n, value);
  } else {
    if (permutations < 1 || rng == nullptr) {
      throw std::invalid_argument("shapley_ranking: sampled mode needs permutations >= 1 and an rng");
    }
    result.phi = sampled_shapley(n, value, permutations, *rng);
    result.samples = permutations;
  }
  return result;
}

}  // namespace divsched
