#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "divsched/channel.hpp"

using namespace divsched;

TEST_CASE("channel draws are deterministic under a fixed seed") {
  ChannelConfig config;
  config.beta_shape_a = 2.0;
  config.beta_shape_b = 5.0;

  Rng rng_a = make_rng(7);
  Rng rng_b = make_rng(7);
  const auto a = sample_channel_conditions(rng_a, config, 3);
  const auto b = sample_channel_conditions(rng_b, config, 3);
  REQUIRE(a.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.drop_rate[i] == b.drop_rate[i]);
    CHECK(a.delay_rate[i] == b.delay_rate[i]);
    CHECK(a.drop_rate[i] > 0.0);
    CHECK(a.drop_rate[i] < 1.0);
    CHECK(a.delay_rate[i] > 0.0);
  }
}

TEST_CASE("beta draws match the distribution mean") {
  const int n = 100'000;

  SUBCASE("Beta(1,1) is uniform with mean 1/2") {
    ChannelConfig config;
    config.beta_shape_a = 1.0;
    config.beta_shape_b = 1.0;
    Rng rng = make_rng(11);
    const auto state = sample_channel_conditions(rng, config, n);
    double mean = 0.0;
    for (double b : state.drop_rate) mean += b;
    mean /= n;
    CHECK(std::abs(mean - 0.5) < 0.01);
  }

  SUBCASE("Beta(2,5) has mean 2/7") {
    ChannelConfig config;
    config.beta_shape_a = 2.0;
    config.beta_shape_b = 5.0;
    Rng rng = make_rng(12);
    const auto state = sample_channel_conditions(rng, config, n);
    double mean = 0.0;
    for (double b : state.drop_rate) mean += b;
    mean /= n;
    CHECK(std::abs(mean - 2.0 / 7.0) < 0.01);
  }
}

TEST_CASE("sample_channel_conditions rejects invalid configs") {
  ChannelConfig config;
  config.beta_shape_a = 0.0;
  Rng rng = make_rng(1);
  CHECK_THROWS_AS(sample_channel_conditions(rng, config, 2), std::invalid_argument);

  ChannelConfig bad_rate;
  bad_rate.channel_rate = -1.0;
  CHECK_THROWS_AS(sample_channel_conditions(rng, bad_rate, 2), std::invalid_argument);

  ChannelConfig ok;
  CHECK_THROWS_AS(sample_channel_conditions(rng, ok, 0), std::invalid_argument);
}

TEST_CASE("expected_delay evaluates the closed form") {
  CHECK(expected_delay(0.1, 1.3) == doctest::Approx(0.8547).epsilon(1e-4));
  CHECK(expected_delay(kRateEpsilon, 2.0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(expected_delay(0.5, 1.0) == doctest::Approx(2.0));
  // Fixed per-attempt transmission delay is also retransmission-scaled.
  CHECK(expected_delay(0.5, 1.0, 0.25) == doctest::Approx(2.5));

  CHECK_THROWS_AS(expected_delay(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(expected_delay(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(expected_delay(0.5, 0.0), std::domain_error);
}

TEST_CASE("expected_delay is monotone in beta and lambda") {
  const double betas[] = {0.05, 0.2, 0.4, 0.6, 0.8};
  const double lambdas[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  for (double lambda : lambdas) {
    for (size_t i = 1; i < std::size(betas); ++i) {
      CHECK(expected_delay(betas[i], lambda) > expected_delay(betas[i - 1], lambda));
    }
  }
  for (double beta : betas) {
    for (size_t i = 1; i < std::size(lambdas); ++i) {
      CHECK(expected_delay(beta, lambdas[i]) < expected_delay(beta, lambdas[i - 1]));
    }
  }
}

TEST_CASE("sampled packet service matches the closed forms") {
  SUBCASE("attempt count is geometric with mean 1/(1-beta)") {
    Rng rng = make_rng(21);
    double mean = 0.0;
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i) {
      mean += sample_packet_service(rng, 0.5, 1.0).first;
    }
    mean /= draws;
    CHECK(std::abs(mean - 2.0) / 2.0 < 0.02);
  }

  SUBCASE("mean delay matches expected_delay for each (beta, lambda) pair") {
    const double betas[] = {0.1, 0.3, 0.5};
    const double lambdas[] = {0.5, 1.0, 2.0};
    Rng rng = make_rng(22);
    for (double beta : betas) {
      for (double lambda : lambdas) {
        double mean = 0.0;
        const int draws = 100'000;
        for (int i = 0; i < draws; ++i) {
          mean += sample_packet_service(rng, beta, lambda).second;
        }
        mean /= draws;
        const double expect = expected_delay(beta, lambda);
        CHECK(std::abs(mean - expect) / expect < 0.02);
      }
    }
  }

  SUBCASE("near-zero drop rate almost always succeeds on the first attempt") {
    Rng rng = make_rng(23);
    int singles = 0;
    const int draws = 10'000;
    for (int i = 0; i < draws; ++i) {
      if (sample_packet_service(rng, kRateEpsilon, 1.0).first == 1) ++singles;
    }
    CHECK(singles >= draws * 999 / 1000);
  }
}

TEST_CASE("effective_throughput arithmetic and linearity") {
  CHECK(effective_throughput(0.5, 0.2, 1.0) == doctest::Approx(0.4));
  CHECK(effective_throughput(0.0, 0.3, 1.0) == 0.0);
  CHECK(effective_throughput(1.0, kRateEpsilon, 1.0) > 0.999);

  // Additive in alpha when the total stays within one channel.
  for (double beta : {0.1, 0.4, 0.7}) {
    for (double a : {0.1, 0.25, 0.5}) {
      const double lhs = effective_throughput(a, beta, 1.0) + effective_throughput(0.3, beta, 1.0);
      const double rhs = effective_throughput(a + 0.3, beta, 1.0);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(effective_throughput(1.5, 0.2, 1.0), std::domain_error);
  CHECK_THROWS_AS(effective_throughput(0.5, 0.0, 1.0), std::domain_error);
}
