#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string_view>

#include "selzip/codec.hpp"
#include "selzip/label.hpp"

namespace selzip {

/// Per-type coefficients: compressed size is `size / compressibility`,
/// compression latency is `alpha * size + beta`.
struct TypeModel {
    DataTypeLabel label{"global"};
    double alpha = 0.0;            // seconds per byte
    double beta = 0.0;             // seconds
    double compressibility = 1.0;  // original / compressed

    /// Throws InvalidModelError when a coefficient is out of range.
    void validate() const;
};

/// One payload awaiting a transfer decision.
class TransferItem {
public:
    TransferItem(Bytes payload, DataTypeLabel label)
        : payload_(std::move(payload)), label_(std::move(label)) {}

    const Bytes& payload() const noexcept { return payload_; }
    const DataTypeLabel& label() const noexcept { return label_; }
    std::uint64_t size() const noexcept { return payload_.size(); }

private:
    Bytes payload_;
    DataTypeLabel label_;
};

struct PolicyConfig {
    std::uint64_t min_size_bytes = 4096;
    std::set<DataTypeLabel> excluded_labels{DataTypeLabel{"image"}, DataTypeLabel{"audio"},
                                            DataTypeLabel{"video"}};
    double default_throughput = 625'000.0;  // bytes per second

    void validate() const;
};

enum class Action : std::uint8_t { SendRaw, Compress };

enum class DecisionReason : std::uint8_t {
    BelowSizeThreshold,
    ExcludedType,
    TradeoffFavorsCompress,
    TradeoffFavorsRaw,
};

struct Decision {
    Action action = Action::SendRaw;
    DecisionReason reason = DecisionReason::TradeoffFavorsRaw;
    // Set only when the tradeoff was evaluated.
    std::optional<std::uint64_t> predicted_compressed_size;
    std::optional<double> predicted_compression_latency;
};

std::string_view to_string(Action a);
std::string_view to_string(DecisionReason r);
Action parse_action(std::string_view s);

std::uint64_t predict_compressed_size(std::uint64_t size, const TypeModel& model);

double predict_compression_latency(std::uint64_t size, const TypeModel& model);

/// First decision step. Returns a SendRaw decision when the item is too small
/// or its type is excluded, otherwise nothing.
std::optional<Decision> threshold_gate(std::uint64_t size, const DataTypeLabel& label,
                                       const PolicyConfig& config);

inline std::optional<Decision> threshold_gate(const TransferItem& item, const PolicyConfig& config) {
    return threshold_gate(item.size(), item.label(), config);
}

/// Full two-step decision. Compress iff
///   predicted_compressed / throughput + predicted_latency < size / throughput.
/// `throughput` is in bytes per second and must be positive.
Decision decide(std::uint64_t size, const DataTypeLabel& label, const TypeModel& model,
                double throughput, const PolicyConfig& config);

inline Decision decide(const TransferItem& item, const TypeModel& model, double throughput,
                       const PolicyConfig& config) {
    return decide(item.size(), item.label(), model, throughput, config);
}

}  // namespace selzip
