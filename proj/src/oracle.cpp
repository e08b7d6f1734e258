#include "selzip/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "selzip/error.hpp"

namespace selzip {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double median(std::vector<double> v) {
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    double hi = *mid;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

template <typename F>
double median_seconds(int repeats, F&& fn) {
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        auto start = Clock::now();
        fn();
        t.push_back(elapsed_since(start));
    }
    return median(std::move(t));
}

}  // namespace

std::string_view to_string(PolicyKind p) {
    switch (p) {
        case PolicyKind::Uncompressed: return "uncompressed";
        case PolicyKind::Compressed: return "compressed";
        case PolicyKind::Selective: return "selective";
        case PolicyKind::TimeOracle: return "oracle";
    }
    return "unknown";
}

PolicyKind parse_policy(std::string_view s) {
    for (PolicyKind p : kAllPolicies)
        if (to_string(p) == s) return p;
    throw InvalidArgumentError("unknown policy '" + std::string(s) + "'");
}

MeasurementLog measure_corpus(const std::vector<ManifestEntry>& manifest, const Codec& codec, int repeats) {
    if (manifest.empty()) throw PreconditionError("corpus manifest is empty");
    repeats = std::max(repeats, 1);
    MeasurementLog log;
    log.codec_id = codec.id();
    log.items.reserve(manifest.size());
    for (const auto& entry : manifest) {
        Bytes payload = read_file(entry.path);
        Bytes compressed;
        CodecMeasurement m;
        m.item_id = entry.path.stem().string();
        m.label = entry.label;
        m.group = entry.group;
        m.raw_bytes = payload.size();
        m.compression_time = median_seconds(repeats, [&] { compressed = codec.compress(payload); });
        m.compressed_bytes = compressed.size();
        m.decompression_time = median_seconds(repeats, [&] {
            if (codec.decompress(compressed).size() != payload.size())
                throw CodecError("round trip size mismatch for " + m.item_id);
        });
        log.items.push_back(std::move(m));
    }
    log.decision_overhead = calibrate_decision_overhead();
    return log;
}

double calibrate_decision_overhead(int iterations) {
    ModelSet models;
    for (const char* name : {"text", "script", "sensor", "json"}) {
        DataTypeLabel label(name);
        models.per_label.emplace(label, TypeModel{label, 2e-8, 1e-4, 4.0});
    }
    models.global_fallback = TypeModel{DataTypeLabel("global"), 2e-8, 1e-4, 2.0};
    const DataTypeLabel labels[] = {DataTypeLabel("text"), DataTypeLabel("image"), DataTypeLabel("json"),
                                    DataTypeLabel("unknown")};
    ThroughputEstimator estimator;
    PolicyConfig config;

    iterations = std::max(iterations, 1);
    std::uint64_t compress_count = 0;
    auto start = Clock::now();
    for (int i = 0; i < iterations; ++i) {
        const auto& label = labels[static_cast<std::size_t>(i) % std::size(labels)];
        std::uint64_t size = 1024 + static_cast<std::uint64_t>(i) * 97 % (1 << 20);
        Decision d = decide(size, label, models.model_for(label), estimator.current_estimate(), config);
        compress_count += d.action == Action::Compress ? 1 : 0;
    }
    double total = elapsed_since(start);
    // Keeps the loop observable.
    if (compress_count > static_cast<std::uint64_t>(iterations)) throw std::logic_error("unreachable");
    return total / iterations;
}

void save_measurements(const MeasurementLog& log, const std::filesystem::path& path) {
    json doc;
    doc["codec_id"] = log.codec_id;
    doc["decision_overhead"] = log.decision_overhead;
    auto& items = doc["items"] = json::array();
    for (const auto& m : log.items) {
        items.push_back({{"item", m.item_id},
                         {"label", m.label.str()},
                         {"group", m.group},
                         {"raw_bytes", m.raw_bytes},
                         {"compressed_bytes", m.compressed_bytes},
                         {"compression_time", m.compression_time},
                         {"decompression_time", m.decompression_time}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write measurements " + path.string());
    out << doc.dump(1) << '\n';
}

MeasurementLog load_measurements(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open measurements " + path.string());
    try {
        json doc = json::parse(in);
        MeasurementLog log;
        log.codec_id = doc.at("codec_id").get<std::string>();
        log.decision_overhead = doc.at("decision_overhead").get<double>();
        for (const auto& j : doc.at("items")) {
            CodecMeasurement m;
            m.item_id = j.at("item").get<std::string>();
            m.label = DataTypeLabel(j.at("label").get<std::string>());
            m.group = j.value("group", std::string{});
            m.raw_bytes = j.at("raw_bytes").get<std::uint64_t>();
            m.compressed_bytes = j.at("compressed_bytes").get<std::uint64_t>();
            m.compression_time = j.at("compression_time").get<double>();
            m.decompression_time = j.at("decompression_time").get<double>();
            log.items.push_back(std::move(m));
        }
        return log;
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

Decision time_oracle(const ItemMeasurement& m) {
    if (m.compressed_total < m.raw_total) return Decision{Action::Compress, DecisionReason::TradeoffFavorsCompress, {}, {}};
    return Decision{Action::SendRaw, DecisionReason::TradeoffFavorsRaw, {}, {}};
}

AnalyticBackend::AnalyticBackend(MeasurementLog log, std::uint64_t seed) : log_(std::move(log)), seed_(seed) {}

TransferOutcome AnalyticBackend::execute(std::size_t index, Action action, const LinkSpec& link, double overhead) {
    const CodecMeasurement& m = log_.items.at(index);
    TransferOutcome o;
    o.item_id = m.item_id;
    o.action_taken = action;
    o.original_bytes = m.raw_bytes;
    o.overhead = overhead;
    if (action == Action::Compress) {
        o.bytes_on_wire = m.compressed_bytes;
        o.compression_time = m.compression_time;
        o.decompression_time = m.decompression_time;
    } else {
        o.bytes_on_wire = m.raw_bytes;
    }
    std::mt19937_64 rng(mix64(seed_ ^ mix64(2 * index + (action == Action::Compress ? 1 : 0))));
    o.transmission_time = transmission_time(o.bytes_on_wire, link, rng);
    return finalize(o);
}

LiveBackend::LiveBackend(std::vector<ManifestEntry> manifest, TransferClient& client)
    : entries_(std::move(manifest)), client_(client) {
    for (const auto& e : entries_) {
        ids_.push_back(e.path.stem().string());
        sizes_.push_back(std::filesystem::file_size(e.path));
    }
}

TransferOutcome LiveBackend::execute(std::size_t index, Action action, const LinkSpec& link, double overhead) {
    const auto& entry = entries_.at(index);
    TransferItem item(read_file(entry.path), entry.label);
    client_.set_link(link);
    Decision d{action, action == Action::Compress ? DecisionReason::TradeoffFavorsCompress
                                                  : DecisionReason::TradeoffFavorsRaw,
               {}, {}};
    return client_.send(item, d, ids_.at(index), overhead);
}

std::vector<ItemMeasurement> dual_measure(TransferBackend& backend, const EpochSchedule& schedule, int repetitions) {
    if (schedule.dataset_size() != backend.size())
        throw InvalidArgumentError("schedule does not cover the dataset");
    repetitions = std::max(repetitions, 1);
    std::vector<ItemMeasurement> out;
    out.reserve(backend.size());
    for (const auto& epoch : schedule.epochs) {
        for (std::size_t i = epoch.begin; i < epoch.end; ++i) {
            std::vector<double> raw_t;
            std::vector<double> comp_t;
            ItemMeasurement m;
            m.item_id = backend.item_id(i);
            for (int r = 0; r < repetitions; ++r) {
                TransferOutcome raw = backend.execute(i, Action::SendRaw, epoch.link, 0.0);
                TransferOutcome comp = backend.execute(i, Action::Compress, epoch.link, 0.0);
                raw_t.push_back(raw.end_to_end());
                comp_t.push_back(comp.end_to_end());
                m.raw_bytes = raw.bytes_on_wire;
                m.compressed_bytes = comp.bytes_on_wire;
            }
            m.raw_total = median(std::move(raw_t));
            m.compressed_total = median(std::move(comp_t));
            out.push_back(std::move(m));
        }
    }
    return out;
}

PolicyRun run_policy(TransferBackend& backend, PolicyKind policy, const EpochSchedule& schedule,
                     const ModelSet* models, ThroughputEstimator& estimator, const PolicyConfig& config,
                     const std::vector<ItemMeasurement>* oracle) {
    if (schedule.dataset_size() != backend.size())
        throw InvalidArgumentError("schedule does not cover the dataset");
    if (policy == PolicyKind::TimeOracle && (!oracle || oracle->size() != backend.size()))
        throw PreconditionError("the oracle policy needs a dual-measurement pass over the same schedule");
    if (policy == PolicyKind::Selective && !models)
        throw PreconditionError("the selective policy needs a trained model set; run `train` first");

    PolicyRun run;
    run.policy = policy;
    run.decisions.reserve(backend.size());
    run.outcomes.reserve(backend.size());
    for (const auto& epoch : schedule.epochs) {
        for (std::size_t i = epoch.begin; i < epoch.end; ++i) {
            Decision d;
            double overhead = 0.0;
            switch (policy) {
                case PolicyKind::Uncompressed:
                    d = Decision{Action::SendRaw, DecisionReason::TradeoffFavorsRaw, {}, {}};
                    break;
                case PolicyKind::Compressed:
                    d = Decision{Action::Compress, DecisionReason::TradeoffFavorsCompress, {}, {}};
                    break;
                case PolicyKind::Selective: {
                    auto start = Clock::now();
                    const auto& label = backend.item_label(i);
                    d = decide(backend.item_size(i), label, models->model_for(label), estimator.current_estimate(),
                               config);
                    overhead = backend.decision_overhead(elapsed_since(start));
                    break;
                }
                case PolicyKind::TimeOracle:
                    d = time_oracle((*oracle)[i]);
                    break;
            }
            TransferOutcome o = backend.execute(i, d.action, epoch.link, overhead);
            ThroughputSample sample{o.bytes_on_wire, o.transmission_time};
            if (sample.valid()) estimator.add_sample(sample);
            run.decisions.push_back(d);
            run.outcomes.push_back(std::move(o));
        }
    }
    return run;
}

double sum_end_to_end(const std::vector<TransferOutcome>& outcomes) {
    double total = 0.0;
    for (const auto& o : outcomes) total += o.end_to_end();
    return total;
}

std::uint64_t sum_bytes_on_wire(const std::vector<TransferOutcome>& outcomes) {
    std::uint64_t total = 0;
    for (const auto& o : outcomes) total += o.bytes_on_wire;
    return total;
}

double speedup(const std::vector<TransferOutcome>& policy, const std::vector<TransferOutcome>& baseline) {
    double p = sum_end_to_end(policy);
    if (p <= 0.0) throw InvalidArgumentError("policy total latency must be positive");
    return sum_end_to_end(baseline) / p;
}

double data_usage(const std::vector<TransferOutcome>& policy, const std::vector<TransferOutcome>& baseline) {
    auto b = sum_bytes_on_wire(baseline);
    if (b == 0) throw InvalidArgumentError("baseline moved no bytes");
    return static_cast<double>(sum_bytes_on_wire(policy)) / static_cast<double>(b);
}

Confusion confusion(const std::vector<Action>& decisions, const std::vector<Action>& oracle) {
    if (decisions.size() != oracle.size()) throw InvalidArgumentError("decision lists differ in length");
    Confusion c;
    c.items = decisions.size();
    if (c.items == 0) return c;
    std::size_t ok = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        if (decisions[i] == oracle[i]) {
            ++ok;
        } else if (decisions[i] == Action::Compress) {
            ++fp;
        } else {
            ++fn;
        }
    }
    const double n = static_cast<double>(c.items);
    c.success_rate = static_cast<double>(ok) / n;
    c.false_positive_rate = static_cast<double>(fp) / n;
    c.false_negative_rate = static_cast<double>(fn) / n;
    return c;
}

Breakdown breakdown(const std::vector<TransferOutcome>& outcomes) {
    double overhead = 0.0;
    double compression = 0.0;
    double transmission = 0.0;
    for (const auto& o : outcomes) {
        overhead += o.overhead;
        compression += o.compression_time;
        transmission += o.transmission_time;
    }
    double total = overhead + compression + transmission;
    if (total <= 0.0) return {};
    return Breakdown{overhead / total, compression / total, transmission / total};
}

std::vector<double> compressed_percentage_series(const std::vector<TransferOutcome>& outcomes,
                                                 const EpochSchedule& schedule) {
    if (schedule.dataset_size() != outcomes.size())
        throw InvalidArgumentError("schedule does not cover the outcome list");
    std::vector<double> series;
    series.reserve(schedule.epochs.size());
    for (const auto& e : schedule.epochs) {
        if (e.end == e.begin) {
            series.push_back(0.0);
            continue;
        }
        std::size_t compressed = 0;
        for (std::size_t i = e.begin; i < e.end; ++i)
            compressed += outcomes[i].action_taken == Action::Compress ? 1 : 0;
        series.push_back(static_cast<double>(compressed) / static_cast<double>(e.end - e.begin));
    }
    return series;
}

std::vector<Action> actions_of(const std::vector<TransferOutcome>& outcomes) {
    std::vector<Action> out;
    out.reserve(outcomes.size());
    for (const auto& o : outcomes) out.push_back(o.action_taken);
    return out;
}

std::vector<Action> oracle_actions(const std::vector<ItemMeasurement>& measurements) {
    std::vector<Action> out;
    out.reserve(measurements.size());
    for (const auto& m : measurements) out.push_back(time_oracle(m).action);
    return out;
}

double standard_error(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double var = ss / static_cast<double>(values.size() - 1);
    return std::sqrt(var / static_cast<double>(values.size()));
}

}  // namespace selzip
