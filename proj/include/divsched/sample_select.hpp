#pragma once

#include <span>
#include <vector>

#include "divsched/dataset.hpp"
#include "divsched/rng.hpp"

namespace divsched {

/// An RSU's local store: one pool of samples per class. Pools shrink as
/// samples are handed to the transmitter (a retransmitted packet keeps
/// carrying the same sample until delivered, so nothing re-enters a pool).
struct RsuInventory {
  std::vector<std::vector<Sample>> pools;  // [class] -> samples

  explicit RsuInventory(int num_classes = 0) : pools(num_classes) {}

  int num_classes() const { return static_cast<int>(pools.size()); }
  long long stock(int class_label) const {
    return static_cast<long long>(pools[class_label].size());
  }
  long long total() const;
  std::vector<double> counts() const;  // c_i^j as doubles for the planners
};

struct ClassifierHyper {
  double learning_rate = 0.5;
  int epochs = 200;
};

/// Multinomial linear scorer: scores(x) = softmax(W x + b). Untrained models
/// emit uniform scores.
struct ProxyClassifier {
  int num_classes = 0;
  int dim = 0;
  std::vector<double> weights;  // row-major C x d
  std::vector<double> bias;     // C
  ClassifierHyper hyper;
  bool trained = false;

  std::vector<double> scores(std::span<const double> features) const;
  int predict(std::span<const double> features) const;
};

/// Difference between the largest and second-largest score. Throws
/// std::domain_error when fewer than two classes are scored.
double margin(std::span<const double> scores);

/// Water-filling quotas: each budgeted packet slot goes to the class with the
/// smallest current global count among classes still stocked by an eligible
/// RSU (ties: lowest class index), hosted by the RSU with the largest
/// remaining stock of that class (ties: lowest RSU index). per_rsu_caps, when
/// given, bounds how many packets each RSU may take. Returns [rsu][class]
/// counts summing to min(budget, reachable stock).
std::vector<std::vector<long long>> class_quota(
    const std::vector<std::vector<double>>& stock, std::vector<double> global_counts,
    long long budget, const std::vector<long long>* per_rsu_caps = nullptr);

/// Indices (into pool) of the k samples with the smallest margin under the
/// model, ties toward the smaller sample id. Without a trained model the
/// choice is uniform at random. k is clamped to the pool size.
std::vector<size_t> min_margin_select(std::span<const Sample> pool, const ProxyClassifier& model,
                                      long long k, Rng& rng);

/// Mean cross-entropy of the scorer over the samples.
double cross_entropy_loss(const ProxyClassifier& model, std::span<const Sample> samples);

/// Analytic gradient of cross_entropy_loss; laid out as (C x d weights,
/// then C biases).
std::vector<double> cross_entropy_gradient(const ProxyClassifier& model,
                                           std::span<const Sample> samples);

/// Fits the scorer by full-batch gradient descent from zero initialization.
/// Deterministic given the sample order. An empty sample set yields an
/// untrained (uniform-scoring) model.
ProxyClassifier train_proxy_classifier(std::span<const Sample> samples, int num_classes, int dim,
                                       const ClassifierHyper& hyper = {});

/// Macro-averaged F1 of the model on a labeled set.
double macro_f1(const ProxyClassifier& model, std::span<const Sample> test_set);

}  // namespace divsched
