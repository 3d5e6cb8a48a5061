#include "divsched/sample_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace divsched {

long long RsuInventory::total() const {
  long long sum = 0;
  for (const auto& pool : pools) sum += static_cast<long long>(pool.size());
  return sum;
}

std::vector<double> RsuInventory::counts() const {
  std::vector<double> c(pools.size());
  for (size_t j = 0; j < pools.size(); ++j) c[j] = static_cast<double>(pools[j].size());
  return c;
}

std::vector<double> ProxyClassifier::scores(std::span<const double> features) const {
  std::vector<double> s(num_classes, 0.0);
  if (!trained || num_classes == 0) {
    std::fill(s.begin(), s.end(), num_classes > 0 ? 1.0 / num_classes : 0.0);
    return s;
  }
  for (int c = 0; c < num_classes; ++c) {
    double z = bias[c];
    const double* w = weights.data() + static_cast<size_t>(c) * dim;
    for (int j = 0; j < dim; ++j) z += w[j] * features[j];
    s[c] = z;
  }
  const double zmax = *std::max_element(s.begin(), s.end());
  double sum = 0.0;
  for (double& z : s) {
    z = std::exp(z - zmax);
    sum += z;
  }
  for (double& z : s) z /= sum;
  return s;
}

int ProxyClassifier::predict(std::span<const double> features) const {
  const auto s = scores(features);
  return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

double margin(std::span<const double> scores) {
  if (scores.size() < 2) {
    throw std::domain_error("margin: needs at least two class scores");
  }
  double top1 = -1.0, top2 = -1.0;
  for (double s : scores) {
    if (s > top1) {
      top2 = top1;
      top1 = s;
    } else if (s > top2) {
      top2 = s;
    }
  }
  return top1 - top2;
}

std::vector<std::vector<long long>> class_quota(
    const std::vector<std::vector<double>>& stock, std::vector<double> global_counts,
    long long budget, const std::vector<long long>* per_rsu_caps) {
  const int num_rsus = static_cast<int>(stock.size());
  const int num_classes = static_cast<int>(global_counts.size());
  for (const auto& s : stock) {
    if (static_cast<int>(s.size()) != num_classes) {
      throw std::invalid_argument("class_quota: stock class count mismatch");
    }
  }
  std::vector<std::vector<double>> remaining = stock;
  std::vector<long long> caps(num_rsus, std::numeric_limits<long long>::max());
  if (per_rsu_caps) caps = *per_rsu_caps;

  std::vector<std::vector<long long>> quota(num_rsus, std::vector<long long>(num_classes, 0));
  for (long long slot = 0; slot < budget; ++slot) {
    int best_class = -1;
    for (int j = 0; j < num_classes; ++j) {
      bool reachable = false;
      for (int i = 0; i < num_rsus; ++i) {
        if (remaining[i][j] >= 1.0 && caps[i] > 0) {
          reachable = true;
          break;
        }
      }
      if (!reachable) continue;
      if (best_class < 0 || global_counts[j] < global_counts[best_class]) best_class = j;
    }
    if (best_class < 0) break;  // stock or caps exhausted

    int best_rsu = -1;
    for (int i = 0; i < num_rsus; ++i) {
      if (remaining[i][best_class] < 1.0 || caps[i] == 0) continue;
      if (best_rsu < 0 || remaining[i][best_class] > remaining[best_rsu][best_class]) {
        best_rsu = i;
      }
    }
    ++quota[best_rsu][best_class];
    remaining[best_rsu][best_class] -= 1.0;
    global_counts[best_class] += 1.0;
    --caps[best_rsu];
  }
  return quota;
}

std::vector<size_t> min_margin_select(std::span<const Sample> pool, const ProxyClassifier& model,
                                      long long k, Rng& rng) {
  const size_t take = static_cast<size_t>(std::min<long long>(k, pool.size()));
  std::vector<size_t> indices(pool.size());
  std::iota(indices.begin(), indices.end(), size_t{0});
  if (take == 0) return {};

  if (!model.trained) {
    // Cold start: uniform without replacement.
    for (size_t j = 0; j < take; ++j) {
      std::uniform_int_distribution<size_t> pick(j, indices.size() - 1);
      std::swap(indices[j], indices[pick(rng)]);
    }
    indices.resize(take);
    std::sort(indices.begin(), indices.end(),
              [&](size_t a, size_t b) { return pool[a].id < pool[b].id; });
    return indices;
  }

  std::vector<double> margins(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    margins[i] = margin(model.scores(pool[i].features));
  }
  std::sort(indices.begin(), indices.end(), [&](size_t a, size_t b) {
    if (margins[a] != margins[b]) return margins[a] < margins[b];
    return pool[a].id < pool[b].id;
  });
  indices.resize(take);
  return indices;
}

double cross_entropy_loss(const ProxyClassifier& model, std::span<const Sample> samples) {
  if (samples.empty()) return 0.0;
  double loss = 0.0;
  for (const auto& s : samples) {
    const auto p = model.scores(s.features);
    loss -= std::log(std::max(p[s.label], 1e-300));
  }
  return loss / static_cast<double>(samples.size());
}

std::vector<double> cross_entropy_gradient(const ProxyClassifier& model,
                                           std::span<const Sample> samples) {
  const int C = model.num_classes;
  const int d = model.dim;
  std::vector<double> grad(static_cast<size_t>(C) * d + C, 0.0);
  if (samples.empty()) return grad;
  for (const auto& s : samples) {
    const auto p = model.scores(s.features);
    for (int c = 0; c < C; ++c) {
      const double delta = p[c] - (c == s.label ? 1.0 : 0.0);
      double* gw = grad.data() + static_cast<size_t>(c) * d;
      for (int j = 0; j < d; ++j) gw[j] += delta * s.features[j];
      grad[static_cast<size_t>(C) * d + c] += delta;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (double& g : grad) g *= inv_n;
  return grad;
}

ProxyClassifier train_proxy_classifier(std::span<const Sample> samples, int num_classes, int dim,
                                       const ClassifierHyper& hyper) {
  ProxyClassifier model;
  model.num_classes = num_classes;
  model.dim = dim;
  model.hyper = hyper;
  model.weights.assign(static_cast<size_t>(num_classes) * dim, 0.0);
  model.bias.assign(num_classes, 0.0);
  if (samples.empty() || num_classes < 1) {
    return model;  // untrained: uniform scores
  }
  model.trained = true;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const auto grad = cross_entropy_gradient(model, samples);
    for (size_t i = 0; i < model.weights.size(); ++i) {
      model.weights[i] -= hyper.learning_rate * grad[i];
    }
    for (int c = 0; c < num_classes; ++c) {
      model.bias[c] -= hyper.learning_rate * grad[static_cast<size_t>(num_classes) * dim + c];
    }
  }
  return model;
}

double macro_f1(const ProxyClassifier& model, std::span<const Sample> test_set) {
  const int C = model.num_classes;
  std::vector<long long> tp(C, 0), fp(C, 0), fn(C, 0);
  for (const auto& s : test_set) {
    const int pred = model.predict(s.features);
    if (pred == s.label) {
      ++tp[s.label];
    } else {
      ++fp[pred];
      ++fn[s.label];
    }
  }
  double sum = 0.0;
  for (int c = 0; c < C; ++c) {
    const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    sum += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
  }
  return C > 0 ? sum / C : 0.0;
}

}  // namespace divsched
