#include "selzip/policy.hpp"

#include <cmath>
#include <string>

#include "selzip/error.hpp"

namespace selzip {

void TypeModel::validate() const {
    if (!std::isfinite(compressibility) || compressibility <= 0.0)
        throw InvalidModelError("compressibility must be finite and positive for '" + label.str() + "'");
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw InvalidModelError("alpha must be finite and non-negative for '" + label.str() + "'");
    if (!std::isfinite(beta) || beta < 0.0)
        throw InvalidModelError("beta must be finite and non-negative for '" + label.str() + "'");
}

void PolicyConfig::validate() const {
    if (!std::isfinite(default_throughput) || default_throughput <= 0.0)
        throw InvalidArgumentError("default_throughput must be positive");
}

std::string_view to_string(Action a) {
    return a == Action::Compress ? "compress" : "raw";
}

std::string_view to_string(DecisionReason r) {
    switch (r) {
        case DecisionReason::BelowSizeThreshold: return "below-size-threshold";
        case DecisionReason::ExcludedType: return "excluded-type";
        case DecisionReason::TradeoffFavorsCompress: return "tradeoff-compress";
        case DecisionReason::TradeoffFavorsRaw: return "tradeoff-raw";
    }
    return "unknown";
}

Action parse_action(std::string_view s) {
    if (s == "compress") return Action::Compress;
    if (s == "raw") return Action::SendRaw;
    throw FormatError("unknown action '" + std::string(s) + "'");
}

std::uint64_t predict_compressed_size(std::uint64_t size, const TypeModel& model) {
    if (!std::isfinite(model.compressibility) || model.compressibility <= 0.0)
        throw InvalidModelError("compressibility must be finite and positive");
    double predicted = std::nearbyint(static_cast<double>(size) / model.compressibility);
    return predicted <= 0.0 ? 0 : static_cast<std::uint64_t>(predicted);
}

double predict_compression_latency(std::uint64_t size, const TypeModel& model) {
    if (!(model.alpha >= 0.0) || !(model.beta >= 0.0) || !std::isfinite(model.alpha) ||
        !std::isfinite(model.beta))
        throw InvalidModelError("latency coefficients must be finite and non-negative");
    return model.alpha * static_cast<double>(size) + model.beta;
}

std::optional<Decision> threshold_gate(std::uint64_t size, const DataTypeLabel& label,
                                       const PolicyConfig& config) {
    if (size < config.min_size_bytes)
        return Decision{Action::SendRaw, DecisionReason::BelowSizeThreshold, {}, {}};
    if (config.excluded_labels.contains(label))
        return Decision{Action::SendRaw, DecisionReason::ExcludedType, {}, {}};
    return std::nullopt;
}

Decision decide(std::uint64_t size, const DataTypeLabel& label, const TypeModel& model,
                double throughput, const PolicyConfig& config) {
    if (!std::isfinite(throughput) || throughput <= 0.0)
        throw InvalidArgumentError("throughput must be finite and positive");
    if (auto gated = threshold_gate(size, label, config)) return *gated;

    model.validate();
    std::uint64_t compressed = predict_compressed_size(size, model);
    double latency = predict_compression_latency(size, model);

    double with_compression = static_cast<double>(compressed) / throughput + latency;
    double without = static_cast<double>(size) / throughput;

    Decision d;
    d.predicted_compressed_size = compressed;
    d.predicted_compression_latency = latency;
    if (with_compression < without) {
        d.action = Action::Compress;
        d.reason = DecisionReason::TradeoffFavorsCompress;
    } else {
        d.action = Action::SendRaw;
        d.reason = DecisionReason::TradeoffFavorsRaw;
    }
    return d;
}

}  // namespace selzip
