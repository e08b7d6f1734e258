#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "selzip/oracle.hpp"

namespace selzip {

/// Everything measured under one link condition: a fixed level, or one
/// dynamic epoch schedule.
struct ConditionResult {
    std::string condition;  // "2mbps", "dynamic", ...
    double mbps = 0.0;      // 0 for dynamic schedules
    EpochSchedule schedule;
    std::vector<ItemMeasurement> oracle;
    PolicyRun baseline;             // Uncompressed, always run
    std::vector<PolicyRun> runs;    // requested policies, in request order
};

struct ReportMeta {
    std::string dataset;
    std::string config_hash;
    std::string codec_id;
    std::uint64_t min_size_bytes = 0;
    std::vector<std::string> excluded_labels;
    double estimator_decay = 0.0;
    std::uint64_t estimator_warmup = 0;
    double estimator_prior = 0.0;
    std::uint64_t seed = 0;
    std::string mode;      // "analytic" or "live"
    std::string grouping;  // how benchmark groups were formed
};

struct ReportRow {
    std::string dataset;
    std::string condition;
    PolicyKind policy = PolicyKind::Uncompressed;
    std::size_t items = 0;
    std::size_t groups = 0;
    double total_s = 0.0;  // end to end, including decompression
    double overhead_s = 0.0;
    double compression_s = 0.0;
    double transmission_s = 0.0;
    double decompression_s = 0.0;
    std::uint64_t bytes_on_wire = 0;
    double speedup = 0.0;
    double speedup_se = 0.0;
    double data_usage = 0.0;
    Breakdown fractions;
    double compressed_fraction = 0.0;
    Confusion accuracy;
    double win_vs_uncompressed = 0.0;
    double win_vs_compressed = 0.0;
};

struct EpochRow {
    std::string condition;
    std::size_t epoch = 0;
    std::size_t partition = 0;
    double mbps = 0.0;
    PolicyKind policy = PolicyKind::Uncompressed;
    std::size_t items = 0;
    double compressed_fraction = 0.0;
    double speedup = 0.0;
};

struct ExperimentReport {
    ReportMeta meta;
    std::vector<ReportRow> rows;
    std::vector<EpochRow> epochs;
};

ExperimentReport build_report(ReportMeta meta, const std::vector<ConditionResult>& conditions,
                              const TransferBackend& backend);

/// Column order of report.csv.
const std::vector<std::string>& report_columns();
const std::vector<std::string>& epoch_columns();

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path);
void write_epoch_csv(const ExperimentReport& report, const std::filesystem::path& path);
void write_report_json(const ExperimentReport& report, const std::filesystem::path& path);

/// Outcome log, one JSON object per transfer.
void write_outcomes_jsonl(const std::vector<ConditionResult>& conditions, const std::filesystem::path& path);

/// Per-item oracle inputs for every condition.
void write_oracle_jsonl(const std::vector<ConditionResult>& conditions, const std::filesystem::path& path);

}  // namespace selzip
