#include "selzip/harness.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "selzip/error.hpp"
#include "selzip/transfer.hpp"

namespace selzip {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string format_mbps(double mbps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%gmbps", mbps);
    return buf;
}

std::vector<ManifestEntry> load_corpus(const ExperimentConfig& config) {
    return read_manifest(config.corpus.manifest_path);
}

std::pair<std::string, int> split_endpoint(const std::string& endpoint) {
    auto colon = endpoint.rfind(':');
    if (colon == std::string::npos) throw InvalidArgumentError("endpoint must be host:port");
    return {endpoint.substr(0, colon), std::stoi(endpoint.substr(colon + 1))};
}

ConditionResult run_condition(TransferBackend& backend, const std::string& name, const EpochSchedule& schedule,
                              const ExperimentConfig& config, const ModelSet* models, int repetitions) {
    ConditionResult c;
    c.condition = name;
    c.mbps = schedule.epochs.size() == 1 ? schedule.epochs.front().link.mbps() : 0.0;
    c.schedule = schedule;
    c.oracle = dual_measure(backend, schedule, repetitions);

    ThroughputEstimator baseline_estimator(config.estimator);
    c.baseline = run_policy(backend, PolicyKind::Uncompressed, schedule, models, baseline_estimator, config.policy);
    for (PolicyKind p : config.policies) {
        if (p == PolicyKind::Uncompressed) {
            c.runs.push_back(c.baseline);
            continue;
        }
        ThroughputEstimator estimator(config.estimator);
        c.runs.push_back(run_policy(backend, p, schedule, models, estimator, config.policy, &c.oracle));
    }
    return c;
}

struct Backends {
    std::unique_ptr<TransferServer> server;
    std::unique_ptr<Codec> codec;
    std::unique_ptr<TransferClient> client;
    std::unique_ptr<TransferBackend> backend;
    int repetitions = 1;
};

Backends make_backend(const ExperimentConfig& config, const MeasurementLog& log) {
    Backends b;
    if (!config.live) {
        b.backend = std::make_unique<AnalyticBackend>(log, config.seed);
        return b;
    }
    std::string host = "127.0.0.1";
    int port = 0;
    if (config.endpoint.empty()) {
        b.server = std::make_unique<TransferServer>();
        port = b.server->start(host, 0);
    } else {
        std::tie(host, port) = split_endpoint(config.endpoint);
    }
    b.codec = make_codec(log.codec_id);
    if (!b.codec) throw InvalidArgumentError("unknown codec '" + log.codec_id + "'");
    b.client = std::make_unique<TransferClient>(host, port, *b.codec);
    b.backend = std::make_unique<LiveBackend>(load_corpus(config), *b.client);
    b.repetitions = std::max(config.live_repetitions, 1);
    return b;
}

void check_alignment(const MeasurementLog& log, const std::vector<ManifestEntry>& manifest) {
    if (log.items.size() != manifest.size())
        throw PreconditionError("measurement log does not match the manifest; delete it and re-run `oracle`");
    for (std::size_t i = 0; i < manifest.size(); ++i)
        if (log.items[i].item_id != manifest[i].path.stem().string())
            throw PreconditionError("measurement log item " + log.items[i].item_id + " does not match the manifest");
}

ReportMeta make_meta(const ExperimentConfig& config, const std::string& codec_id) {
    ReportMeta meta;
    meta.dataset = config.dataset;
    meta.config_hash = config_hash(config);
    meta.codec_id = codec_id;
    meta.min_size_bytes = config.policy.min_size_bytes;
    for (const auto& l : config.policy.excluded_labels) meta.excluded_labels.push_back(l.str());
    meta.estimator_decay = config.estimator.decay;
    meta.estimator_warmup = config.estimator.warmup;
    meta.estimator_prior = config.estimator.prior;
    meta.seed = config.seed;
    meta.mode = config.live ? "live" : "analytic";
    meta.grouping = "manifest group field; items without one are grouped by label";
    return meta;
}

json config_json(const ExperimentConfig& config) {
    json j;
    j["dataset"] = config.dataset;
    j["levels_mbps"] = config.levels_mbps;
    j["dynamic"] = config.dynamic;
    j["partitions"] = config.partitions;
    j["sequence_mbps"] = config.sequence_mbps;
    j["rtt"] = config.rtt;
    j["jitter"] = config.jitter;
    j["seed"] = config.seed;
    std::vector<std::string> policies;
    for (auto p : config.policies) policies.emplace_back(to_string(p));
    j["policies"] = policies;
    j["estimator"] = {{"decay", config.estimator.decay},
                      {"warmup", config.estimator.warmup},
                      {"prior", config.estimator.prior}};
    std::vector<std::string> excluded;
    for (const auto& l : config.policy.excluded_labels) excluded.push_back(l.str());
    j["threshold"] = {{"min_size_bytes", config.policy.min_size_bytes},
                      {"excluded_labels", excluded},
                      {"default_throughput", config.policy.default_throughput}};
    j["live"] = config.live;
    return j;
}

}  // namespace

void ExperimentConfig::validate(bool need_models) const {
    if (corpus.mode != CorpusMode::Manifest) throw InvalidArgumentError("experiments run over a manifest corpus");
    if (!fs::exists(corpus.manifest_path))
        throw PreconditionError("manifest " + corpus.manifest_path.string() + " does not exist");
    if (need_models && (models.empty() || !fs::exists(models)))
        throw PreconditionError("the selective policy needs a trained model set (missing '" + models.string() +
                                "'); run `selzip train` first");
    if (levels_mbps.empty() && sequence_mbps.empty()) throw InvalidArgumentError("no link levels given");
    for (double l : levels_mbps)
        if (!(l > 0.0)) throw InvalidArgumentError("link levels must be positive");
    for (double l : sequence_mbps)
        if (!(l > 0.0)) throw InvalidArgumentError("link levels must be positive");
    if (dynamic && partitions == 0) throw InvalidArgumentError("partitions must be positive");
    if (policies.empty()) throw InvalidArgumentError("no policies requested");
    estimator.validate();
    policy.validate();
    LinkSpec{1.0, rtt, jitter}.validate();
}

std::string canonical_config(const ExperimentConfig& config) { return config_json(config).dump(); }

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<ManifestEntry> cmd_gen(const SyntheticParams& params, const fs::path& out_dir) {
    return generate_corpus(params, out_dir);
}

ModelSet cmd_train(const fs::path& manifest, const fs::path& models_out, std::vector<std::string>* warnings) {
    DeflateCodec codec;
    ModelSet models = train_corpus(read_manifest(manifest), codec, warnings);
    if (models_out.has_parent_path()) fs::create_directories(models_out.parent_path());
    save_model_set(models, models_out);
    return models;
}

MeasurementLog ensure_measurements(const ExperimentConfig& config) {
    const auto manifest = load_corpus(config);
    if (!config.measurements.empty() && fs::exists(config.measurements)) {
        MeasurementLog log = load_measurements(config.measurements);
        check_alignment(log, manifest);
        return log;
    }
    DeflateCodec codec;
    MeasurementLog log = measure_corpus(manifest, codec);
    if (!config.measurements.empty()) {
        if (config.measurements.has_parent_path()) fs::create_directories(config.measurements.parent_path());
        save_measurements(log, config.measurements);
    }
    return log;
}

std::vector<std::pair<std::string, EpochSchedule>> build_conditions(const ExperimentConfig& config,
                                                                    std::size_t dataset_size) {
    std::vector<std::pair<std::string, EpochSchedule>> out;
    auto link = [&](double mbps) { return LinkSpec::from_mbps(mbps, config.rtt, config.jitter); };
    if (config.dynamic) {
        if (!config.sequence_mbps.empty()) {
            std::vector<LinkSpec> links;
            for (double m : config.sequence_mbps) links.push_back(link(m));
            out.emplace_back("dynamic", make_fixed_sequence(dataset_size, links, config.seed));
        } else {
            std::vector<LinkSpec> levels;
            for (double m : config.levels_mbps) levels.push_back(link(m));
            out.emplace_back("dynamic", make_schedule(dataset_size, config.partitions, levels, config.seed));
        }
        return out;
    }
    for (double m : config.levels_mbps) out.emplace_back(format_mbps(m), make_constant_schedule(dataset_size, link(m)));
    return out;
}

std::vector<ConditionResult> cmd_oracle(const ExperimentConfig& config) {
    config.validate(false);
    MeasurementLog log = ensure_measurements(config);
    Backends b = make_backend(config, log);
    std::vector<ConditionResult> results;
    for (const auto& [name, schedule] : build_conditions(config, b.backend->size())) {
        ConditionResult c;
        c.condition = name;
        c.schedule = schedule;
        c.oracle = dual_measure(*b.backend, schedule, b.repetitions);
        results.push_back(std::move(c));
    }
    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        write_oracle_jsonl(results, config.out_dir / "oracle.jsonl");
    }
    return results;
}

ExperimentReport cmd_run(const ExperimentConfig& config) {
    bool need_models = false;
    for (auto p : config.policies) need_models |= p == PolicyKind::Selective;
    config.validate(need_models);

    MeasurementLog log = ensure_measurements(config);
    std::optional<ModelSet> models;
    if (need_models) {
        models = load_model_set(config.models);
        if (models->codec_id != log.codec_id)
            throw PreconditionError("model set was trained with codec '" + models->codec_id +
                                    "' but measurements use '" + log.codec_id + "'");
    }

    Backends b = make_backend(config, log);
    std::vector<ConditionResult> results;
    const auto conditions = build_conditions(config, b.backend->size());
    for (const auto& [name, schedule] : conditions)
        results.push_back(
            run_condition(*b.backend, name, schedule, config, models ? &*models : nullptr, b.repetitions));

    ExperimentReport report = build_report(make_meta(config, log.codec_id), results, *b.backend);
    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        write_outcomes_jsonl(results, config.out_dir / "outcomes.jsonl");
        write_oracle_jsonl(results, config.out_dir / "oracle.jsonl");
        write_report_csv(report, config.out_dir / "report.csv");
        write_epoch_csv(report, config.out_dir / "epochs.csv");
        write_report_json(report, config.out_dir / "report.json");

        json resolved = config_json(config);
        resolved["config_hash"] = config_hash(config);
        resolved["codec_id"] = log.codec_id;
        resolved["manifest"] = config.corpus.manifest_path.string();
        resolved["models"] = config.models.string();
        resolved["measurements"] = config.measurements.string();
        std::ofstream(config.out_dir / "config.json") << resolved.dump(2) << '\n';

        if (config.dynamic) {
            const auto& schedule = conditions.front().second;
            save_schedule(schedule, config.sequence_mbps.empty() ? config.levels_mbps : config.sequence_mbps,
                          config.out_dir / "schedule.json");
        }
    }
    return report;
}

std::string cmd_report(const fs::path& report_json) {
    std::ifstream in(report_json);
    if (!in) throw IoError("cannot open " + report_json.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(report_json.string() + ": " + e.what());
    }
    std::ostringstream os;
    os << "dataset " << doc.value("dataset", "") << "  codec " << doc.value("codec_id", "") << "  mode "
       << doc.value("mode", "") << "  config " << doc.value("config_hash", "") << '\n';
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-13s %10s %8s %8s %8s %8s %8s %8s\n", "condition", "policy", "total_s",
                  "speedup", "usage", "compr%", "success", "fp", "fn");
    os << line;
    for (const auto& r : doc.at("rows")) {
        const auto& c = r.at("confusion");
        std::snprintf(line, sizeof line, "%-10s %-13s %10.4f %8.3f %8.3f %8.1f %8.3f %8.3f %8.3f\n",
                      r.at("condition").get<std::string>().c_str(), r.at("policy").get<std::string>().c_str(),
                      r.at("total_s").get<double>(), r.at("speedup").get<double>(), r.at("data_usage").get<double>(),
                      100.0 * r.at("compressed_frac").get<double>(), c.at("success_rate").get<double>(),
                      c.at("false_positive_rate").get<double>(), c.at("false_negative_rate").get<double>());
        os << line;
    }
    return os.str();
}

}  // namespace selzip
