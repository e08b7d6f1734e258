#pragma once

#include <cstdint>
#include <mutex>
#include <optional>

namespace selzip {

struct ThroughputSample {
    std::uint64_t bytes_transferred = 0;
    double elapsed = 0.0;  // seconds

    bool valid() const noexcept { return bytes_transferred > 0 && elapsed > 0.0; }
    double rate() const noexcept { return static_cast<double>(bytes_transferred) / elapsed; }
};

struct EstimatorParams {
    double decay = 0.05;
    std::uint64_t warmup = 1;
    double prior = 625'000.0;  // bytes per second

    void validate() const;
};

/// Value-type EWMA state. The free functions below are pure.
struct EstimatorState {
    EstimatorParams params;
    std::optional<double> ewma;
    std::uint64_t sample_count = 0;
};

/// Throws InvalidArgumentError for a sample with non-positive bytes or elapsed.
EstimatorState add_sample(EstimatorState state, const ThroughputSample& sample);
double current_estimate(const EstimatorState& state) noexcept;
EstimatorState reset(EstimatorState state) noexcept;

/// Shared estimator: a mutex-guarded EstimatorState. Readers get a
/// consistent snapshot.
class ThroughputEstimator {
public:
    explicit ThroughputEstimator(EstimatorParams params = {});

    void add_sample(const ThroughputSample& sample);
    double current_estimate() const;
    void reset();
    EstimatorState snapshot() const;

private:
    mutable std::mutex mu_;
    EstimatorState state_;
};

}  // namespace selzip
