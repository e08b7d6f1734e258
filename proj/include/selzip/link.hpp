#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <vector>

namespace selzip {

inline constexpr double kBytesPerSecondPerMbps = 125'000.0;

inline constexpr double mbps_to_bytes_per_second(double mbps) { return mbps * kBytesPerSecondPerMbps; }
inline constexpr double bytes_per_second_to_mbps(double bps) { return bps / kBytesPerSecondPerMbps; }

struct LinkSpec {
    double bandwidth = mbps_to_bytes_per_second(5.0);  // bytes per second
    double rtt = 0.0;                                  // seconds
    double jitter_fraction = 0.0;                      // in [0, 1)

    void validate() const;

    static LinkSpec from_mbps(double mbps, double rtt = 0.0, double jitter = 0.0) {
        return LinkSpec{mbps_to_bytes_per_second(mbps), rtt, jitter};
    }
    double mbps() const { return bytes_per_second_to_mbps(bandwidth); }

    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

/// `(rtt + bytes / bandwidth) * (1 + u)`, u uniform in [-jitter, +jitter)
/// drawn from `rng`. No draw is made when jitter is zero.
double transmission_time(std::uint64_t bytes, const LinkSpec& link, std::mt19937_64& rng);

/// Jitter-free form.
double transmission_time(std::uint64_t bytes, const LinkSpec& link);

/// Uniform double in [0, 1) built from the top 53 bits; identical on every
/// standard library, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Epoch {
    std::size_t partition_index = 0;
    LinkSpec link;
    std::size_t begin = 0;  // first item index (inclusive)
    std::size_t end = 0;    // one past the last item index
};

/// Ordered epochs covering a dataset exactly once, in order.
struct EpochSchedule {
    std::vector<Epoch> epochs;
    std::uint64_t seed = 0;

    /// Epoch holding item `index`.
    const Epoch& epoch_for(std::size_t index) const;
    std::size_t dataset_size() const { return epochs.empty() ? 0 : epochs.back().end; }
};

/// Equal-count partitions; each partition's link is drawn uniformly from
/// `levels` with a generator seeded by `seed`.
EpochSchedule make_schedule(std::size_t dataset_size, std::size_t n_partitions,
                            const std::vector<LinkSpec>& levels, std::uint64_t seed);

/// Explicit per-partition links, in order (no random draw).
EpochSchedule make_fixed_sequence(std::size_t dataset_size, const std::vector<LinkSpec>& links,
                                  std::uint64_t seed = 0);

/// Single epoch at one link: the fixed-condition experiment.
inline EpochSchedule make_constant_schedule(std::size_t dataset_size, const LinkSpec& link) {
    return make_fixed_sequence(dataset_size, {link});
}

void save_schedule(const EpochSchedule& schedule, const std::vector<double>& levels_mbps,
                   const std::filesystem::path& path);

/// Token bucket with explicit time, so it can be driven by a fake clock.
class TokenBucket {
public:
    /// `initial` is the starting balance; a negative value means full.
    TokenBucket(double rate, double capacity, double now, double initial = -1.0);

    /// Debits `n` tokens at time `now` and returns how long the caller must
    /// wait before those bytes may leave. The balance may go negative.
    double reserve(std::uint64_t n, double now);

    double rate() const noexcept { return rate_; }
    double capacity() const noexcept { return capacity_; }

private:
    double rate_;
    double capacity_;
    double tokens_;
    double last_;
};

inline constexpr std::size_t kShaperBucketBytes = 64 * 1024;

/// Paces writes to an inner byte sink so the sustained rate stays at or
/// below the link bandwidth. Writes are serialized. The bucket starts empty,
/// so a fresh writer never bursts: each request pays bytes / rate from its
/// first byte, matching the analytic link.
class ShapedWriter {
public:
    using Sink = std::function<bool(const char*, std::size_t)>;

    ShapedWriter(const LinkSpec& link, Sink inner, std::size_t bucket_bytes = kShaperBucketBytes);

    bool write(const char* data, std::size_t len);

private:
    std::mutex mu_;
    Sink inner_;
    TokenBucket bucket_;
    std::size_t chunk_;
};

}  // namespace selzip
