#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "selzip/error.hpp"
#include "selzip/link.hpp"
#include "selzip/throughput.hpp"

using namespace selzip;

TEST_CASE("first sample seeds the average") {
    EstimatorState s;
    CHECK(current_estimate(s) == 625'000.0);
    s = add_sample(s, {250'000, 1.0});
    CHECK(current_estimate(s) == 250'000.0);
    CHECK(s.sample_count == 1);
}

TEST_CASE("one EWMA step") {
    EstimatorState s;
    s.ewma = 100'000.0;
    s.sample_count = 5;
    s = add_sample(s, {200'000, 1.0});
    CHECK(current_estimate(s) == doctest::Approx(105'000.0).epsilon(1e-15));
}

TEST_CASE("constant stream is a fixed point") {
    EstimatorState s;
    for (int k = 1; k <= 200; ++k) {
        s = add_sample(s, {125'000, 0.5});
        CHECK(current_estimate(s) == doctest::Approx(250'000.0).epsilon(1e-14));
    }
}

TEST_CASE("warmup holds the prior") {
    EstimatorState s;
    s.params.warmup = 3;
    s.params.prior = 1000.0;
    s = add_sample(s, {500, 1.0});
    s = add_sample(s, {500, 1.0});
    CHECK(current_estimate(s) == 1000.0);
    s = add_sample(s, {500, 1.0});
    CHECK(current_estimate(s) == 500.0);
}

TEST_CASE("invalid samples are rejected") {
    EstimatorState s;
    CHECK_THROWS_AS(add_sample(s, {1000, 0.0}), InvalidArgumentError);
    CHECK_THROWS_AS(add_sample(s, {1000, -1.0}), InvalidArgumentError);
    CHECK_THROWS_AS(add_sample(s, {0, 1.0}), InvalidArgumentError);
    CHECK_THROWS_AS(ThroughputEstimator(EstimatorParams{0.0, 1, 1.0}), InvalidArgumentError);
    CHECK_THROWS_AS(ThroughputEstimator(EstimatorParams{0.5, 1, 0.0}), InvalidArgumentError);
}

TEST_CASE("reset keeps decay and prior") {
    EstimatorState s;
    s.params.decay = 0.2;
    s.params.prior = 42.0;
    s = add_sample(s, {1000, 1.0});
    s = reset(s);
    CHECK_FALSE(s.ewma);
    CHECK(s.sample_count == 0);
    CHECK(s.params.decay == 0.2);
    CHECK(current_estimate(s) == 42.0);
}

TEST_CASE("smoothing lag after a step change follows b(2 - (1-d)^n)") {
    const double b = 250'000.0;
    const double d = 0.05;
    EstimatorState s;
    s = add_sample(s, {250'000, 1.0});
    for (int n = 1; n <= 100; ++n) {
        s = add_sample(s, {500'000, 1.0});
        CHECK(current_estimate(s) == doctest::Approx(b * (2.0 - std::pow(1.0 - d, n))).epsilon(1e-12));
    }
}

TEST_CASE("property: estimate bounded by prior and observed rates") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        EstimatorState s;
        s.params.decay = 0.01 + unit_uniform(rng) * 0.99;
        double lo = s.params.prior;
        double hi = s.params.prior;
        for (int i = 0; i < 100; ++i) {
            ThroughputSample sample{1 + rng() % 10'000'000, 0.001 + unit_uniform(rng) * 10.0};
            lo = std::min(lo, sample.rate());
            hi = std::max(hi, sample.rate());
            s = add_sample(s, sample);
            double e = current_estimate(s);
            CHECK(e >= lo * (1 - 1e-12));
            CHECK(e <= hi * (1 + 1e-12));
        }
    }
}

TEST_CASE("property: convergence under 10% noise within 30 samples") {
    const double b = mbps_to_bytes_per_second(5.0);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        std::mt19937_64 rng(seed);
        EstimatorState s;
        for (int i = 0; i < 30; ++i) {
            double noisy = b * (1.0 + (2.0 * unit_uniform(rng) - 1.0) * 0.1);
            s = add_sample(s, {static_cast<std::uint64_t>(noisy), 1.0});
        }
        worst = std::max(worst, std::abs(current_estimate(s) - b) / b);
    }
    CHECK(worst < 0.10);
}

TEST_CASE("shared estimator: concurrent writers and readers") {
    ThroughputEstimator est(EstimatorParams{0.05, 1, 1000.0});
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 5000; ++i) est.add_sample({2000, 1.0});
        });
        threads.emplace_back([&] {
            for (int i = 0; i < 5000; ++i) {
                double e = est.current_estimate();
                CHECK((e == 1000.0 || e == 2000.0));
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(est.snapshot().sample_count == 20'000);
    est.reset();
    CHECK(est.current_estimate() == 1000.0);
}
