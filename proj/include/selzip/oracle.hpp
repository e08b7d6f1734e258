#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selzip/codec.hpp"
#include "selzip/link.hpp"
#include "selzip/policy.hpp"
#include "selzip/throughput.hpp"
#include "selzip/training.hpp"
#include "selzip/transfer.hpp"

namespace selzip {

enum class PolicyKind : std::uint8_t { Uncompressed, Compressed, Selective, TimeOracle };

std::string_view to_string(PolicyKind p);
PolicyKind parse_policy(std::string_view s);

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Uncompressed, PolicyKind::Compressed,
                                              PolicyKind::Selective, PolicyKind::TimeOracle};

/// Codec behaviour of one corpus item, measured once and replayed by the
/// analytic backend.
struct CodecMeasurement {
    std::string item_id;
    DataTypeLabel label{"global"};
    std::string group;
    std::uint64_t raw_bytes = 0;
    std::uint64_t compressed_bytes = 0;
    double compression_time = 0.0;
    double decompression_time = 0.0;
};

struct MeasurementLog {
    std::string codec_id;
    double decision_overhead = 0.0;  // mean wall time of one decide() call
    std::vector<CodecMeasurement> items;
};

/// Measures every manifest entry (median of `repeats` for both codec
/// directions) and calibrates the decision overhead.
MeasurementLog measure_corpus(const std::vector<ManifestEntry>& manifest, const Codec& codec, int repeats = 3);

/// Mean wall time of one decide() call over `iterations` calls.
double calibrate_decision_overhead(int iterations = 20000);

void save_measurements(const MeasurementLog& log, const std::filesystem::path& path);
MeasurementLog load_measurements(const std::filesystem::path& path);

/// The oracle's inputs for one item: both end-to-end totals under the same
/// link conditions.
struct ItemMeasurement {
    std::string item_id;
    double raw_total = 0.0;
    double compressed_total = 0.0;
    std::uint64_t raw_bytes = 0;
    std::uint64_t compressed_bytes = 0;
};

/// Compress iff compressed_total < raw_total; ties send raw.
Decision time_oracle(const ItemMeasurement& m);

/// Executes one transfer of dataset item `index` under `link`.
class TransferBackend {
public:
    virtual ~TransferBackend() = default;

    virtual TransferOutcome execute(std::size_t index, Action action, const LinkSpec& link, double overhead) = 0;

    /// Overhead charged for one decision, given the wall time just measured.
    virtual double decision_overhead(double measured) const { return measured; }

    virtual std::size_t size() const = 0;
    virtual std::uint64_t item_size(std::size_t index) const = 0;
    virtual const DataTypeLabel& item_label(std::size_t index) const = 0;
    virtual const std::string& item_id(std::size_t index) const = 0;
    virtual const std::string& item_group(std::size_t index) const = 0;
};

/// Replays measured codec timings with analytic link transmission. Fully
/// deterministic: the jitter draw for (item, action) depends only on the
/// seed, so repeated executions of the same transfer are identical.
class AnalyticBackend final : public TransferBackend {
public:
    AnalyticBackend(MeasurementLog log, std::uint64_t seed);

    TransferOutcome execute(std::size_t index, Action action, const LinkSpec& link, double overhead) override;
    double decision_overhead(double) const override { return log_.decision_overhead; }

    std::size_t size() const override { return log_.items.size(); }
    std::uint64_t item_size(std::size_t i) const override { return log_.items.at(i).raw_bytes; }
    const DataTypeLabel& item_label(std::size_t i) const override { return log_.items.at(i).label; }
    const std::string& item_id(std::size_t i) const override { return log_.items.at(i).item_id; }
    const std::string& item_group(std::size_t i) const override { return log_.items.at(i).group; }

    const MeasurementLog& log() const noexcept { return log_; }

private:
    MeasurementLog log_;
    std::uint64_t seed_;
};

/// Sends real payloads through a TransferClient, pacing each request at the
/// epoch's link rate.
class LiveBackend final : public TransferBackend {
public:
    LiveBackend(std::vector<ManifestEntry> manifest, TransferClient& client);

    TransferOutcome execute(std::size_t index, Action action, const LinkSpec& link, double overhead) override;

    std::size_t size() const override { return entries_.size(); }
    std::uint64_t item_size(std::size_t i) const override { return sizes_.at(i); }
    const DataTypeLabel& item_label(std::size_t i) const override { return entries_.at(i).label; }
    const std::string& item_id(std::size_t i) const override { return ids_.at(i); }
    const std::string& item_group(std::size_t i) const override { return entries_.at(i).group; }

private:
    std::vector<ManifestEntry> entries_;
    std::vector<std::string> ids_;
    std::vector<std::uint64_t> sizes_;
    TransferClient& client_;
};

/// Sends every item raw and compressed under its epoch's link and records
/// both end-to-end totals; medians over `repetitions`.
std::vector<ItemMeasurement> dual_measure(TransferBackend& backend, const EpochSchedule& schedule,
                                          int repetitions = 1);

struct PolicyRun {
    PolicyKind policy = PolicyKind::Uncompressed;
    std::vector<Decision> decisions;
    std::vector<TransferOutcome> outcomes;
};

/// Runs one policy over every item in order. Selective consults `models` and
/// the live `estimator`; every completed transfer feeds the estimator.
/// TimeOracle requires `oracle` from a prior dual_measure() over the same
/// schedule.
PolicyRun run_policy(TransferBackend& backend, PolicyKind policy, const EpochSchedule& schedule,
                     const ModelSet* models, ThroughputEstimator& estimator, const PolicyConfig& config,
                     const std::vector<ItemMeasurement>* oracle = nullptr);

double sum_end_to_end(const std::vector<TransferOutcome>& outcomes);
std::uint64_t sum_bytes_on_wire(const std::vector<TransferOutcome>& outcomes);

/// Σ baseline end-to-end / Σ policy end-to-end.
double speedup(const std::vector<TransferOutcome>& policy, const std::vector<TransferOutcome>& baseline);

/// Σ policy bytes on wire / Σ baseline bytes on wire.
double data_usage(const std::vector<TransferOutcome>& policy, const std::vector<TransferOutcome>& baseline);

struct Confusion {
    double success_rate = 0.0;
    double false_positive_rate = 0.0;  // compressed when the oracle sent raw
    double false_negative_rate = 0.0;  // sent raw when the oracle compressed
    std::size_t items = 0;
};

Confusion confusion(const std::vector<Action>& decisions, const std::vector<Action>& oracle);

struct Breakdown {
    double overhead = 0.0;
    double compression = 0.0;
    double transmission = 0.0;
};

/// Component sums over summed client totals. All zero for an empty or
/// zero-time run.
Breakdown breakdown(const std::vector<TransferOutcome>& outcomes);

/// Fraction of items compressed in each epoch.
std::vector<double> compressed_percentage_series(const std::vector<TransferOutcome>& outcomes,
                                                 const EpochSchedule& schedule);

std::vector<Action> actions_of(const std::vector<TransferOutcome>& outcomes);
std::vector<Action> oracle_actions(const std::vector<ItemMeasurement>& measurements);

/// Sample standard error of the mean; 0 for fewer than two values.
double standard_error(const std::vector<double>& values);

}  // namespace selzip
