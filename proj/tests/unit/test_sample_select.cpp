#include <algorithm>
#include <cmath>
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "divsched/sample_select.hpp"

using namespace divsched;

namespace {

Sample make_sample(long long id, int label, std::vector<double> features) {
  Sample s;
  s.id = id;
  s.label = label;
  s.features = std::move(features);
  return s;
}

// Two well separated 1-D blobs.
std::vector<Sample> separable_blobs(int per_class, Rng& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Sample> samples;
  long long id = 0;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < per_class; ++i) {
      samples.push_back(make_sample(id++, c, {c == 0 ? -2.0 + noise(rng) : 2.0 + noise(rng)}));
    }
  }
  return samples;
}

}  // namespace

TEST_CASE("class_quota water-filling") {
  const std::vector<std::vector<double>> stock{{10, 0}, {0, 10}};

  SUBCASE("balanced start splits the budget evenly") {
    const auto quota = class_quota(stock, {0, 0}, 4);
    CHECK(quota[0][0] == 2);
    CHECK(quota[0][1] == 0);
    CHECK(quota[1][0] == 0);
    CHECK(quota[1][1] == 2);
  }

  SUBCASE("a trailing class absorbs the whole budget") {
    const auto quota = class_quota(stock, {5, 0}, 4);
    CHECK(quota[0][0] == 0);
    CHECK(quota[1][1] == 4);
  }

  SUBCASE("zero budget assigns nothing") {
    const auto quota = class_quota(stock, {0, 0}, 0);
    CHECK(quota[0][0] + quota[0][1] + quota[1][0] + quota[1][1] == 0);
  }

  SUBCASE("delivery is short when stock runs out") {
    const std::vector<std::vector<double>> thin{{1, 0}, {0, 2}};
    const auto quota = class_quota(thin, {0, 0}, 10);
    CHECK(quota[0][0] == 1);
    CHECK(quota[1][1] == 2);
  }

  SUBCASE("per-RSU caps bound each host") {
    const std::vector<long long> caps{1, 10};
    const auto quota = class_quota(stock, {0, 0}, 6, &caps);
    CHECK(quota[0][0] == 1);  // capped; class 0 then unreachable
    CHECK(quota[1][1] == 5);
  }

  SUBCASE("class count mismatch is rejected") {
    const std::vector<std::vector<double>> bad{{1, 2, 3}};
    CHECK_THROWS_AS(class_quota(bad, {0, 0}, 1), std::invalid_argument);
  }
}

TEST_CASE("class_quota properties on random instances") {
  Rng rng = make_rng(5);
  std::uniform_int_distribution<int> stock_dist(0, 12);
  std::uniform_int_distribution<int> count_dist(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const int rsus = 1 + static_cast<int>(rng() % 4);
    const int classes = 2 + static_cast<int>(rng() % 4);
    std::vector<std::vector<double>> stock(rsus, std::vector<double>(classes));
    for (auto& row : stock) {
      for (double& v : row) v = stock_dist(rng);
    }
    std::vector<double> counts(classes);
    for (double& v : counts) v = count_dist(rng);
    const long long budget = rng() % 30;

    const auto quota = class_quota(stock, counts, budget);

    long long assigned = 0;
    std::vector<double> post(counts);
    std::vector<std::vector<double>> remaining(stock);
    for (int i = 0; i < rsus; ++i) {
      for (int j = 0; j < classes; ++j) {
        CHECK(quota[i][j] <= static_cast<long long>(stock[i][j]));
        assigned += quota[i][j];
        post[j] += static_cast<double>(quota[i][j]);
        remaining[i][j] -= static_cast<double>(quota[i][j]);
      }
    }
    CHECK(assigned <= budget);

    // Spread over classes with leftover stock never grows by more than one.
    auto spread = [&](const std::vector<double>& v) {
      double lo = 1e18, hi = -1e18;
      bool found = false;
      for (int j = 0; j < classes; ++j) {
        bool stocked = false;
        for (int i = 0; i < rsus; ++i) stocked = stocked || remaining[i][j] >= 1.0;
        if (!stocked) continue;
        found = true;
        lo = std::min(lo, v[j]);
        hi = std::max(hi, v[j]);
      }
      return found ? hi - lo : 0.0;
    };
    CHECK(spread(post) <= spread(counts) + 1.0 + 1e-9);
  }
}

TEST_CASE("margin of a score vector") {
  CHECK(margin(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(margin(std::vector<double>{0.999, 0.001}) == doctest::Approx(0.998));
  CHECK(margin(std::vector<double>{0.5, 0.3, 0.2}) == doctest::Approx(0.2));
  CHECK_THROWS_AS(margin(std::vector<double>{1.0}), std::domain_error);

  // Permuting entries below the top two leaves the margin unchanged.
  CHECK(margin(std::vector<double>{0.4, 0.3, 0.2, 0.1}) ==
        margin(std::vector<double>{0.4, 0.3, 0.1, 0.2}));
}

TEST_CASE("min_margin_select picks the most uncertain samples") {
  // 1-D two-class scorer: margin grows with |x|.
  ProxyClassifier model;
  model.num_classes = 2;
  model.dim = 1;
  model.weights = {1.0, -1.0};
  model.bias = {0.0, 0.0};
  model.trained = true;

  std::vector<Sample> pool;
  pool.push_back(make_sample(0, 0, {0.05}));   // smallest margin
  pool.push_back(make_sample(1, 0, {-1.5}));
  pool.push_back(make_sample(2, 0, {0.35}));   // second smallest

  Rng rng = make_rng(6);
  CHECK(min_margin_select(pool, model, 1, rng) == std::vector<size_t>{0});
  auto two = min_margin_select(pool, model, 2, rng);
  std::sort(two.begin(), two.end());
  CHECK(two == std::vector<size_t>{0, 2});
  CHECK(min_margin_select(pool, model, 99, rng).size() == pool.size());
}

TEST_CASE("min_margin_select cold start is a seeded uniform draw") {
  ProxyClassifier untrained;
  untrained.num_classes = 2;
  untrained.dim = 1;
  std::vector<Sample> pool;
  for (int i = 0; i < 20; ++i) pool.push_back(make_sample(i, 0, {static_cast<double>(i)}));

  Rng rng_a = make_rng(7);
  Rng rng_b = make_rng(7);
  const auto a = min_margin_select(pool, untrained, 5, rng_a);
  const auto b = min_margin_select(pool, untrained, 5, rng_b);
  CHECK(a == b);
  CHECK(a.size() == 5);
}

TEST_CASE("softmax scores are a probability vector") {
  Rng rng = make_rng(8);
  const auto samples = separable_blobs(40, rng);
  const auto model = train_proxy_classifier(samples, 2, 1);
  std::uniform_real_distribution<double> x(-4.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> features{x(rng)};
    const auto s = model.scores(features);
    double sum = 0.0;
    for (double v : s) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("training fits separable blobs") {
  Rng rng = make_rng(9);
  const auto samples = separable_blobs(100, rng);
  const auto model = train_proxy_classifier(samples, 2, 1);
  int correct = 0;
  for (const auto& s : samples) {
    if (model.predict(s.features) == s.label) ++correct;
  }
  CHECK(correct >= 190);
}

TEST_CASE("single-class store predicts that class everywhere") {
  std::vector<Sample> samples;
  Rng rng = make_rng(10);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < 50; ++i) samples.push_back(make_sample(i, 2, {noise(rng), noise(rng)}));
  const auto model = train_proxy_classifier(samples, 4, 2);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> features{noise(rng) * 3, noise(rng) * 3};
    CHECK(model.predict(features) == 2);
  }
}

TEST_CASE("empty store yields an untrained uniform model") {
  const auto model = train_proxy_classifier({}, 3, 2);
  CHECK_FALSE(model.trained);
  const std::vector<double> features{1.0, -1.0};
  const auto s = model.scores(features);
  for (double v : s) CHECK(v == doctest::Approx(1.0 / 3));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng = make_rng(11);
  std::normal_distribution<double> noise(0.0, 1.0);
  const int C = 3, d = 4;

  ProxyClassifier model;
  model.num_classes = C;
  model.dim = d;
  model.trained = true;
  model.weights.resize(C * d);
  model.bias.resize(C);
  for (double& w : model.weights) w = noise(rng) * 0.5;
  for (double& b : model.bias) b = noise(rng) * 0.1;

  std::vector<Sample> samples;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> features(d);
    for (double& f : features) f = noise(rng);
    samples.push_back(make_sample(i, static_cast<int>(rng() % C), std::move(features)));
  }

  const auto grad = cross_entropy_gradient(model, samples);
  const double eps = 1e-5;
  auto numeric = [&](double* param) {
    const double saved = *param;
    *param = saved + eps;
    const double hi = cross_entropy_loss(model, samples);
    *param = saved - eps;
    const double lo = cross_entropy_loss(model, samples);
    *param = saved;
    return (hi - lo) / (2 * eps);
  };
  for (int i = 0; i < C * d; ++i) {
    const double fd = numeric(&model.weights[i]);
    CHECK(std::abs(grad[i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
  for (int c = 0; c < C; ++c) {
    const double fd = numeric(&model.bias[c]);
    CHECK(std::abs(grad[C * d + c] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("macro F1 is perfect for a perfect classifier and chance-level for uniform") {
  Rng rng = make_rng(12);
  const auto samples = separable_blobs(50, rng);
  const auto model = train_proxy_classifier(samples, 2, 1);
  CHECK(macro_f1(model, samples) > 0.95);

  ProxyClassifier untrained;
  untrained.num_classes = 2;
  untrained.dim = 1;
  CHECK(macro_f1(untrained, samples) <= 0.5);
}
