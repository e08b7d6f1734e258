#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <map>
#include <thread>

#include "selzip/error.hpp"
#include "selzip/link.hpp"

using namespace selzip;

TEST_CASE("unit conversion") {
    CHECK(mbps_to_bytes_per_second(1.0) == 125'000.0);
    CHECK(LinkSpec::from_mbps(2.0).bandwidth == 250'000.0);
    CHECK(LinkSpec::from_mbps(10.0).mbps() == 10.0);
}

TEST_CASE("analytic transmission time") {
    std::mt19937_64 rng(1);
    CHECK(transmission_time(1'000'000, LinkSpec::from_mbps(2.0), rng) == 4.0);
    CHECK(transmission_time(0, LinkSpec{250'000.0, 0.02, 0.0}, rng) == 0.02);
    // No draw is consumed without jitter.
    std::mt19937_64 fresh(1);
    CHECK(rng() == fresh());
}

TEST_CASE("jittered transmission is seeded and bounded") {
    LinkSpec link{1'000'000.0, 0.0, 0.2};
    std::mt19937_64 a(77);
    std::mt19937_64 b(77);
    for (int i = 0; i < 1000; ++i) {
        double ta = transmission_time(500'000, link, a);
        CHECK(ta == transmission_time(500'000, link, b));
        CHECK(ta >= 0.5 * 0.8);
        CHECK(ta <= 0.5 * 1.2);
    }
}

TEST_CASE("link validation") {
    CHECK_THROWS_AS(LinkSpec({0.0, 0.0, 0.0}).validate(), InvalidArgumentError);
    CHECK_THROWS_AS(LinkSpec({1.0, -1.0, 0.0}).validate(), InvalidArgumentError);
    CHECK_THROWS_AS(LinkSpec({1.0, 0.0, 1.0}).validate(), InvalidArgumentError);
    CHECK_NOTHROW(LinkSpec({1.0, 0.0, 0.99}).validate());
}

TEST_CASE("make_schedule: equal-count partitions in order") {
    std::vector<LinkSpec> levels{LinkSpec::from_mbps(2), LinkSpec::from_mbps(5), LinkSpec::from_mbps(10)};
    auto s = make_schedule(103, 4, levels, 9);
    REQUIRE(s.epochs.size() == 4);
    CHECK(s.epochs.front().begin == 0);
    CHECK(s.epochs.back().end == 103);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(s.epochs[i].partition_index == i);
        if (i) CHECK(s.epochs[i].begin == s.epochs[i - 1].end);
        auto n = s.epochs[i].end - s.epochs[i].begin;
        CHECK((n == 25 || n == 26));
    }
    for (std::size_t i = 0; i < 103; ++i) {
        const Epoch& e = s.epoch_for(i);
        CHECK(i >= e.begin);
        CHECK(i < e.end);
    }
    CHECK_THROWS_AS(s.epoch_for(103), InvalidArgumentError);
}

TEST_CASE("make_schedule: seeded determinism and degenerate level list") {
    std::vector<LinkSpec> levels{LinkSpec::from_mbps(2), LinkSpec::from_mbps(5), LinkSpec::from_mbps(10)};
    auto a = make_schedule(400, 4, levels, 1234);
    auto b = make_schedule(400, 4, levels, 1234);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.epochs[i].link == b.epochs[i].link);

    auto single = make_schedule(400, 4, {LinkSpec::from_mbps(5)}, 99);
    for (const auto& e : single.epochs) CHECK(e.link == LinkSpec::from_mbps(5));

    CHECK_THROWS_AS(make_schedule(10, 0, levels, 1), InvalidArgumentError);
    CHECK_THROWS_AS(make_schedule(10, 2, {}, 1), InvalidArgumentError);
}

TEST_CASE("make_schedule: level frequencies are near uniform across seeds") {
    std::vector<LinkSpec> levels{LinkSpec::from_mbps(2), LinkSpec::from_mbps(5), LinkSpec::from_mbps(10)};
    std::map<double, int> counts;
    int draws = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        for (const auto& e : make_schedule(400, 4, levels, seed).epochs) {
            ++counts[e.link.bandwidth];
            ++draws;
        }
    }
    REQUIRE(counts.size() == 3);
    for (const auto& [bw, n] : counts) {
        double f = static_cast<double>(n) / draws;
        CHECK(std::abs(f - 1.0 / 3.0) / (1.0 / 3.0) <= 0.05);
    }
}

TEST_CASE("fixed sequence and constant schedule") {
    auto s = make_fixed_sequence(10, {LinkSpec::from_mbps(10), LinkSpec::from_mbps(2)});
    REQUIRE(s.epochs.size() == 2);
    CHECK(s.epochs[0].link.mbps() == 10.0);
    CHECK(s.epochs[1].link.mbps() == 2.0);
    CHECK(s.epochs[0].end == 5);
    auto c = make_constant_schedule(7, LinkSpec::from_mbps(5));
    REQUIRE(c.epochs.size() == 1);
    CHECK(c.dataset_size() == 7);
}

TEST_CASE("token bucket: burst then sustained rate") {
    TokenBucket tb(1000.0, 500.0, 0.0);
    CHECK(tb.reserve(500, 0.0) == 0.0);
    CHECK(tb.reserve(100, 0.0) == doctest::Approx(0.1));
    // Paced sender: sleep exactly as told; long-run rate equals the bucket rate.
    double now = 0.1;
    for (int i = 0; i < 100; ++i) now += tb.reserve(100, now);
    CHECK(now == doctest::Approx(10.1).epsilon(1e-9));
    // Idle time refills only up to capacity.
    TokenBucket idle(1000.0, 500.0, 0.0);
    idle.reserve(500, 0.0);
    CHECK(idle.reserve(500, 100.0) == 0.0);
    CHECK(idle.reserve(1, 100.0) > 0.0);
    // Empty start: the first bytes already wait.
    TokenBucket empty(1000.0, 500.0, 0.0, 0.0);
    CHECK(empty.reserve(100, 0.0) == doctest::Approx(0.1));
}

TEST_CASE("shaped writer paces an in-memory sink") {
    std::size_t written = 0;
    LinkSpec link{2'000'000.0, 0.0, 0.0};
    ShapedWriter w(link, [&](const char*, std::size_t n) {
        written += n;
        return true;
    });
    std::vector<char> buf(1'000'000);
    auto start = std::chrono::steady_clock::now();
    CHECK(w.write(buf.data(), buf.size()));
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(written == buf.size());
    // no initial burst: 1 MB / 2 MB/s
    CHECK(elapsed >= 0.5 * 0.98);
    CHECK(elapsed <= 0.5 * 1.10);
}

TEST_CASE("shaped writer propagates sink failure") {
    ShapedWriter w(LinkSpec{1e9, 0.0, 0.0}, [](const char*, std::size_t) { return false; });
    char c = 0;
    CHECK_FALSE(w.write(&c, 1));
}
