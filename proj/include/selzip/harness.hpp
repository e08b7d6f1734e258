#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "selzip/corpus.hpp"
#include "selzip/oracle.hpp"
#include "selzip/policy.hpp"
#include "selzip/report.hpp"
#include "selzip/throughput.hpp"
#include "selzip/training.hpp"

namespace selzip {

enum class CorpusMode : std::uint8_t { Manifest, Synthetic };

struct CorpusSpec {
    CorpusMode mode = CorpusMode::Manifest;
    std::filesystem::path manifest_path;
    SyntheticParams synthetic;
};

struct ExperimentConfig {
    std::string dataset = "corpus";
    CorpusSpec corpus;
    std::filesystem::path models;        // required for the selective policy
    std::filesystem::path measurements;  // codec measurement log; created when absent
    std::filesystem::path out_dir;

    std::vector<double> levels_mbps{2.0, 5.0, 10.0};
    bool dynamic = false;
    std::size_t partitions = 4;
    std::vector<double> sequence_mbps;  // explicit per-epoch levels; overrides random draws
    double rtt = 0.0;
    double jitter = 0.0;
    std::uint64_t seed = 1;

    std::vector<PolicyKind> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
    EstimatorParams estimator;
    PolicyConfig policy;

    bool live = false;
    std::string endpoint;  // host:port; empty starts an in-process server
    int live_repetitions = 3;

    /// Throws when a referenced input is missing or a value is out of range.
    void validate(bool need_models) const;
};

/// Canonical JSON of the settings that determine results (paths excluded).
std::string canonical_config(const ExperimentConfig& config);

/// 64-bit FNV-1a of canonical_config(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::vector<ManifestEntry> cmd_gen(const SyntheticParams& params, const std::filesystem::path& out_dir);

ModelSet cmd_train(const std::filesystem::path& manifest, const std::filesystem::path& models_out,
                   std::vector<std::string>* warnings = nullptr);

/// Loads the codec measurement log named by the config, measuring the corpus
/// and saving it first when the file does not exist.
MeasurementLog ensure_measurements(const ExperimentConfig& config);

/// Link schedules implied by the config, one per reported condition.
std::vector<std::pair<std::string, EpochSchedule>> build_conditions(const ExperimentConfig& config,
                                                                    std::size_t dataset_size);

/// Dual-measurement pass for every condition; writes oracle.jsonl.
std::vector<ConditionResult> cmd_oracle(const ExperimentConfig& config);

/// Runs every requested policy (plus the Uncompressed baseline) under every
/// condition and writes outcomes.jsonl, oracle.jsonl, report.csv,
/// epochs.csv, report.json and config.json into the output directory.
ExperimentReport cmd_run(const ExperimentConfig& config);

/// Human-readable summary of a report.json.
std::string cmd_report(const std::filesystem::path& report_json);

}  // namespace selzip
