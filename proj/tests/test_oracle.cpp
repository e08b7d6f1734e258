#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "selzip/error.hpp"
#include "selzip/oracle.hpp"

using namespace selzip;

namespace {

TransferOutcome outcome(double total, std::uint64_t bytes, Action a = Action::SendRaw) {
    TransferOutcome o;
    o.action_taken = a;
    o.transmission_time = total;
    o.bytes_on_wire = bytes;
    return finalize(o);
}

/// Random codec measurements: a mix of compressible, incompressible and tiny
/// items with plausible timing.
MeasurementLog synthetic_log(std::size_t n, std::uint64_t seed, bool homogeneous = false) {
    std::mt19937_64 rng(seed);
    MeasurementLog log;
    log.codec_id = "deflate";
    log.decision_overhead = 2e-7;
    for (std::size_t i = 0; i < n; ++i) {
        CodecMeasurement m;
        m.item_id = "item-" + std::to_string(i);
        m.group = "g" + std::to_string(i / 10);
        int kind = homogeneous ? 0 : static_cast<int>(rng() % 3);
        if (kind == 0) {
            m.label = DataTypeLabel("text");
            m.raw_bytes = 4096 + rng() % 500'000;
            double ratio = 2.0 + unit_uniform(rng) * 3.0;
            m.compressed_bytes = static_cast<std::uint64_t>(static_cast<double>(m.raw_bytes) / ratio);
        } else if (kind == 1) {
            m.label = DataTypeLabel("image");
            m.raw_bytes = 4096 + rng() % 500'000;
            m.compressed_bytes = m.raw_bytes + m.raw_bytes / 3000 + 11;
        } else {
            m.label = DataTypeLabel("sensor");
            m.raw_bytes = 30 + rng() % 220;
            m.compressed_bytes = m.raw_bytes * 3 / 4 + 8;
        }
        m.compression_time = 3e-8 * static_cast<double>(m.raw_bytes) * (0.8 + 0.4 * unit_uniform(rng)) + 5e-6;
        m.decompression_time = m.compression_time / 5.0;
        log.items.push_back(m);
    }
    return log;
}

ModelSet fitted(const MeasurementLog& log) {
    std::vector<TrainingSample> samples;
    for (const auto& m : log.items)
        samples.push_back({m.label, m.raw_bytes, m.compressed_bytes, m.compression_time});
    return fit_model_set(samples, log.codec_id);
}

}  // namespace

TEST_CASE("time oracle picks the smaller total; ties send raw") {
    CHECK(time_oracle({"a", 4.0, 1.02, 1, 1}).action == Action::Compress);
    CHECK(time_oracle({"b", 0.9, 1.2, 1, 1}).action == Action::SendRaw);
    CHECK(time_oracle({"c", 1.5, 1.5, 1, 1}).action == Action::SendRaw);
}

TEST_CASE("speedup and data usage") {
    std::vector<TransferOutcome> base{outcome(6.0, 400), outcome(4.0, 400)};
    std::vector<TransferOutcome> half{outcome(3.0, 100), outcome(2.0, 100)};
    CHECK(speedup(half, base) == 2.0);
    CHECK(speedup(base, base) == 1.0);
    CHECK(data_usage(half, base) == 0.25);
    CHECK(data_usage(base, base) == 1.0);
    CHECK_THROWS_AS(speedup({}, base), InvalidArgumentError);
    CHECK_THROWS_AS(data_usage(base, {}), InvalidArgumentError);
}

TEST_CASE("confusion rates") {
    using A = Action;
    auto same = confusion({A::Compress, A::SendRaw}, {A::Compress, A::SendRaw});
    CHECK(same.success_rate == 1.0);
    CHECK(same.false_positive_rate == 0.0);
    CHECK(same.false_negative_rate == 0.0);

    auto fn = confusion({A::SendRaw}, {A::Compress});
    CHECK(fn.false_negative_rate == 1.0);
    auto fp = confusion({A::Compress}, {A::SendRaw});
    CHECK(fp.false_positive_rate == 1.0);

    auto mixed = confusion({A::Compress, A::SendRaw, A::Compress, A::SendRaw}, {A::Compress, A::Compress, A::SendRaw, A::SendRaw});
    CHECK(mixed.success_rate == 0.5);
    CHECK(mixed.false_positive_rate == 0.25);
    CHECK(mixed.false_negative_rate == 0.25);
    CHECK_THROWS_AS(confusion({A::Compress}, {}), InvalidArgumentError);
}

TEST_CASE("breakdown fractions") {
    TransferOutcome o;
    o.overhead = 0.01;
    o.compression_time = 0.19;
    o.transmission_time = 0.8;
    o.decompression_time = 5.0;  // excluded from the client breakdown
    finalize(o);
    Breakdown b = breakdown({o, o});
    CHECK(b.overhead == doctest::Approx(0.01));
    CHECK(b.compression == doctest::Approx(0.19));
    CHECK(b.transmission == doctest::Approx(0.8));
    CHECK(std::abs(b.overhead + b.compression + b.transmission - 1.0) < 1e-12);
    Breakdown empty = breakdown({});
    CHECK(empty.overhead + empty.compression + empty.transmission == 0.0);
}

TEST_CASE("compressed percentage per epoch") {
    auto schedule = make_fixed_sequence(4, {LinkSpec::from_mbps(10), LinkSpec::from_mbps(2)});
    std::vector<TransferOutcome> outs{outcome(1, 1, Action::SendRaw), outcome(1, 1, Action::Compress),
                                      outcome(1, 1, Action::Compress), outcome(1, 1, Action::Compress)};
    auto series = compressed_percentage_series(outs, schedule);
    REQUIRE(series.size() == 2);
    CHECK(series[0] == 0.5);
    CHECK(series[1] == 1.0);
    CHECK_THROWS_AS(compressed_percentage_series({outs[0]}, schedule), InvalidArgumentError);
}

TEST_CASE("standard error") {
    CHECK(standard_error({}) == 0.0);
    CHECK(standard_error({3.0}) == 0.0);
    // sd of {1,2,3,4} = sqrt(5/3); se = sd / 2
    CHECK(standard_error({1, 2, 3, 4}) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("analytic backend replays measurements") {
    MeasurementLog log = synthetic_log(5, 1);
    AnalyticBackend backend(log, 9);
    LinkSpec link = LinkSpec::from_mbps(2);
    const auto& m = log.items[0];
    TransferOutcome raw = backend.execute(0, Action::SendRaw, link, 0.0);
    CHECK(raw.bytes_on_wire == m.raw_bytes);
    CHECK(raw.transmission_time == static_cast<double>(m.raw_bytes) / link.bandwidth);
    CHECK(raw.compression_time == 0.0);
    CHECK(raw.decompression_time == 0.0);
    TransferOutcome comp = backend.execute(0, Action::Compress, link, 0.001);
    CHECK(comp.bytes_on_wire == m.compressed_bytes);
    CHECK(comp.compression_time == m.compression_time);
    CHECK(comp.decompression_time == m.decompression_time);
    CHECK(comp.total == 0.001 + m.compression_time + comp.transmission_time);
    CHECK(backend.decision_overhead(123.0) == log.decision_overhead);

    LinkSpec jittery{250'000.0, 0.0, 0.3};
    CHECK(backend.execute(3, Action::Compress, jittery, 0).transmission_time ==
          backend.execute(3, Action::Compress, jittery, 0).transmission_time);
}

TEST_CASE("run_policy preconditions and forced policies") {
    MeasurementLog log = synthetic_log(30, 2);
    AnalyticBackend backend(log, 1);
    auto schedule = make_constant_schedule(30, LinkSpec::from_mbps(5));
    ThroughputEstimator est;
    PolicyConfig config;
    CHECK_THROWS_AS(run_policy(backend, PolicyKind::TimeOracle, schedule, nullptr, est, config), PreconditionError);
    CHECK_THROWS_AS(run_policy(backend, PolicyKind::Selective, schedule, nullptr, est, config), PreconditionError);
    CHECK_THROWS_AS(run_policy(backend, PolicyKind::Uncompressed, make_constant_schedule(29, LinkSpec::from_mbps(5)),
                               nullptr, est, config),
                    InvalidArgumentError);

    auto raw = run_policy(backend, PolicyKind::Uncompressed, schedule, nullptr, est, config);
    auto all = run_policy(backend, PolicyKind::Compressed, schedule, nullptr, est, config);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(raw.outcomes[i].action_taken == Action::SendRaw);
        CHECK(all.outcomes[i].action_taken == Action::Compress);
        CHECK(raw.outcomes[i].overhead == 0.0);
    }
    // Every transfer fed the estimator, and the analytic link reports its exact rate.
    CHECK(est.snapshot().sample_count == 60);
    CHECK(est.current_estimate() == doctest::Approx(LinkSpec::from_mbps(5).bandwidth).epsilon(1e-12));

    ModelSet models = fitted(log);
    ThroughputEstimator sel_est;
    auto sel = run_policy(backend, PolicyKind::Selective, schedule, &models, sel_est, config);
    for (std::size_t i = 0; i < 30; ++i) {
        const auto& d = sel.decisions[i];
        CHECK(sel.outcomes[i].action_taken == d.action);
        if (log.items[i].label == DataTypeLabel("image")) CHECK(d.reason == DecisionReason::ExcludedType);
        if (log.items[i].raw_bytes < 4096) CHECK(d.reason == DecisionReason::BelowSizeThreshold);
        CHECK(sel.outcomes[i].overhead == log.decision_overhead);
    }
}

TEST_CASE("property: oracle dominance per item and in aggregate") {
    PolicyConfig config;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MeasurementLog log = synthetic_log(120, seed);
        ModelSet models = fitted(log);
        AnalyticBackend backend(log, seed);
        std::mt19937_64 rng(seed);
        double mbps = 0.5 + unit_uniform(rng) * 30.0;
        double jitter = seed % 2 ? 0.2 : 0.0;
        auto schedule = seed % 3 == 0
                            ? make_schedule(120, 4, {LinkSpec::from_mbps(2, 0, jitter), LinkSpec::from_mbps(10, 0, jitter)}, seed)
                            : make_constant_schedule(120, LinkSpec::from_mbps(mbps, 0.001 * (seed % 4), jitter));

        auto oracle = dual_measure(backend, schedule);
        std::vector<PolicyRun> runs;
        for (PolicyKind p : kAllPolicies) {
            ThroughputEstimator est;
            runs.push_back(run_policy(backend, p, schedule, &models, est, config, &oracle));
        }
        const auto& raw = runs[0].outcomes;
        const auto& comp = runs[1].outcomes;
        const auto& best = runs[3].outcomes;
        for (std::size_t i = 0; i < 120; ++i) {
            CHECK(best[i].end_to_end() <= std::min(raw[i].end_to_end(), comp[i].end_to_end()));
            CHECK(best[i].end_to_end() <= runs[2].outcomes[i].end_to_end());
            CHECK(oracle[i].raw_total == raw[i].end_to_end());
            CHECK(oracle[i].compressed_total == comp[i].end_to_end());
        }
        double oracle_speedup = speedup(best, raw);
        for (const auto& r : runs) CHECK(oracle_speedup >= speedup(r.outcomes, raw));
    }
}

TEST_CASE("property: perfect model reproduces the oracle on gate-passing items") {
    PolicyConfig config;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        MeasurementLog log = synthetic_log(150, seed);
        AnalyticBackend backend(log, seed);
        double mbps = 0.5 + static_cast<double>(seed % 7) * 4.0;
        LinkSpec link = LinkSpec::from_mbps(mbps);
        auto oracle = dual_measure(backend, make_constant_schedule(150, link));
        std::size_t checked = 0;
        for (std::size_t i = 0; i < 150; ++i) {
            const auto& m = log.items[i];
            if (threshold_gate(m.raw_bytes, m.label, config)) continue;
            TypeModel perfect{m.label, 0.0, m.compression_time + m.decompression_time,
                              static_cast<double>(m.raw_bytes) / static_cast<double>(m.compressed_bytes)};
            CHECK(predict_compressed_size(m.raw_bytes, perfect) == m.compressed_bytes);
            CHECK(decide(m.raw_bytes, m.label, perfect, link.bandwidth, config).action == time_oracle(oracle[i]).action);
            ++checked;
        }
        CHECK(checked > 20);
    }
}

TEST_CASE("property: lower bandwidth never lowers the compressed percentage") {
    MeasurementLog log = synthetic_log(200, 55, true);
    ModelSet models = fitted(log);
    AnalyticBackend backend(log, 55);
    PolicyConfig config;
    double previous = 2.0;
    for (double mbps = 0.25; mbps <= 400.0; mbps *= 1.5) {
        ThroughputEstimator est;
        auto run = run_policy(backend, PolicyKind::Selective, make_constant_schedule(200, LinkSpec::from_mbps(mbps)),
                              &models, est, config);
        double pct = compressed_percentage_series(run.outcomes, make_constant_schedule(200, LinkSpec::from_mbps(mbps)))[0];
        CHECK(pct <= previous);
        previous = pct;
    }
    CHECK(previous < 1.0);
}

TEST_CASE("measurement log persistence") {
    MeasurementLog log = synthetic_log(10, 3);
    auto path = std::filesystem::temp_directory_path() / "selzip_measurements.json";
    save_measurements(log, path);
    MeasurementLog back = load_measurements(path);
    REQUIRE(back.items.size() == 10);
    CHECK(back.decision_overhead == log.decision_overhead);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(back.items[i].item_id == log.items[i].item_id);
        CHECK(back.items[i].label == log.items[i].label);
        CHECK(back.items[i].compression_time == log.items[i].compression_time);
        CHECK(back.items[i].compressed_bytes == log.items[i].compressed_bytes);
    }
    std::filesystem::remove(path);
    CHECK(calibrate_decision_overhead(1000) > 0.0);
    CHECK(parse_policy("oracle") == PolicyKind::TimeOracle);
    CHECK_THROWS_AS(parse_policy("magic"), InvalidArgumentError);
}
