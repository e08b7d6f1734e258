#include "selzip/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "selzip/error.hpp"

namespace selzip {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct GroupIndex {
    std::vector<std::string> names;
    std::vector<std::size_t> of_item;
};

GroupIndex index_groups(const TransferBackend& backend) {
    GroupIndex g;
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < backend.size(); ++i) {
        const std::string& name = backend.item_group(i).empty() ? backend.item_label(i).str() : backend.item_group(i);
        auto [it, inserted] = seen.emplace(name, g.names.size());
        if (inserted) g.names.push_back(name);
        g.of_item.push_back(it->second);
    }
    return g;
}

std::vector<double> group_totals(const std::vector<TransferOutcome>& outcomes, const GroupIndex& g) {
    std::vector<double> totals(g.names.size(), 0.0);
    for (std::size_t i = 0; i < outcomes.size(); ++i) totals[g.of_item[i]] += outcomes[i].end_to_end();
    return totals;
}

double win_rate(const std::vector<double>& mine, const std::vector<double>& theirs) {
    if (mine.empty()) return 0.0;
    std::size_t wins = 0;
    for (std::size_t k = 0; k < mine.size(); ++k) wins += mine[k] < theirs[k] ? 1 : 0;
    return static_cast<double>(wins) / static_cast<double>(mine.size());
}

const PolicyRun* find_run(const ConditionResult& c, PolicyKind p) {
    if (p == PolicyKind::Uncompressed) return &c.baseline;
    for (const auto& r : c.runs)
        if (r.policy == p) return &r;
    return nullptr;
}

void write_csv_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

}  // namespace

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols{
        "dataset",        "condition",         "policy",           "items",
        "groups",         "total_s",           "overhead_s",       "compression_s",
        "transmission_s", "decompression_s",   "bytes_on_wire",    "speedup",
        "speedup_se",     "data_usage",        "overhead_frac",    "compression_frac",
        "transmission_frac", "compressed_frac", "success_rate",    "false_positive_rate",
        "false_negative_rate", "win_vs_uncompressed", "win_vs_compressed"};
    return cols;
}

const std::vector<std::string>& epoch_columns() {
    static const std::vector<std::string> cols{"condition", "epoch", "partition",       "mbps",
                                               "policy",    "items", "compressed_frac", "speedup"};
    return cols;
}

ExperimentReport build_report(ReportMeta meta, const std::vector<ConditionResult>& conditions,
                              const TransferBackend& backend) {
    ExperimentReport report;
    report.meta = std::move(meta);
    const GroupIndex groups = index_groups(backend);

    for (const auto& c : conditions) {
        const auto oracle = oracle_actions(c.oracle);
        const auto base_groups = group_totals(c.baseline.outcomes, groups);
        const PolicyRun* compressed_run = find_run(c, PolicyKind::Compressed);
        std::vector<double> compressed_groups;
        if (compressed_run) compressed_groups = group_totals(compressed_run->outcomes, groups);

        std::vector<const PolicyRun*> rows;
        for (const auto& r : c.runs) rows.push_back(r.policy == PolicyKind::Uncompressed ? &c.baseline : &r);

        for (const PolicyRun* run : rows) {
            const auto& outs = run->outcomes;
            ReportRow row;
            row.dataset = report.meta.dataset;
            row.condition = c.condition;
            row.policy = run->policy;
            row.items = outs.size();
            row.groups = groups.names.size();
            for (const auto& o : outs) {
                row.overhead_s += o.overhead;
                row.compression_s += o.compression_time;
                row.transmission_s += o.transmission_time;
                row.decompression_s += o.decompression_time;
                row.compressed_fraction += o.action_taken == Action::Compress ? 1.0 : 0.0;
            }
            if (!outs.empty()) row.compressed_fraction /= static_cast<double>(outs.size());
            row.total_s = sum_end_to_end(outs);
            row.bytes_on_wire = sum_bytes_on_wire(outs);
            row.speedup = speedup(outs, c.baseline.outcomes);
            row.data_usage = data_usage(outs, c.baseline.outcomes);
            row.fractions = breakdown(outs);
            row.accuracy = confusion(actions_of(outs), oracle);

            const auto mine = group_totals(outs, groups);
            std::vector<double> per_group_speedup;
            for (std::size_t k = 0; k < mine.size(); ++k)
                if (mine[k] > 0.0) per_group_speedup.push_back(base_groups[k] / mine[k]);
            row.speedup_se = standard_error(per_group_speedup);
            row.win_vs_uncompressed = win_rate(mine, base_groups);
            row.win_vs_compressed = compressed_run ? win_rate(mine, compressed_groups) : 0.0;
            report.rows.push_back(std::move(row));

            const auto series = compressed_percentage_series(outs, c.schedule);
            for (std::size_t e = 0; e < c.schedule.epochs.size(); ++e) {
                const Epoch& epoch = c.schedule.epochs[e];
                EpochRow er;
                er.condition = c.condition;
                er.epoch = e;
                er.partition = epoch.partition_index;
                er.mbps = epoch.link.mbps();
                er.policy = run->policy;
                er.items = epoch.end - epoch.begin;
                er.compressed_fraction = series[e];
                double mine_t = 0.0;
                double base_t = 0.0;
                for (std::size_t i = epoch.begin; i < epoch.end; ++i) {
                    mine_t += outs[i].end_to_end();
                    base_t += c.baseline.outcomes[i].end_to_end();
                }
                er.speedup = mine_t > 0.0 ? base_t / mine_t : 0.0;
                report.epochs.push_back(std::move(er));
            }
        }
    }
    return report;
}

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv_line(out, report_columns());
    for (const auto& r : report.rows) {
        write_csv_line(out, {r.dataset,
                             r.condition,
                             std::string(to_string(r.policy)),
                             std::to_string(r.items),
                             std::to_string(r.groups),
                             fmt_double(r.total_s),
                             fmt_double(r.overhead_s),
                             fmt_double(r.compression_s),
                             fmt_double(r.transmission_s),
                             fmt_double(r.decompression_s),
                             std::to_string(r.bytes_on_wire),
                             fmt_double(r.speedup),
                             fmt_double(r.speedup_se),
                             fmt_double(r.data_usage),
                             fmt_double(r.fractions.overhead),
                             fmt_double(r.fractions.compression),
                             fmt_double(r.fractions.transmission),
                             fmt_double(r.compressed_fraction),
                             fmt_double(r.accuracy.success_rate),
                             fmt_double(r.accuracy.false_positive_rate),
                             fmt_double(r.accuracy.false_negative_rate),
                             fmt_double(r.win_vs_uncompressed),
                             fmt_double(r.win_vs_compressed)});
    }
}

void write_epoch_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv_line(out, epoch_columns());
    for (const auto& e : report.epochs) {
        write_csv_line(out, {e.condition, std::to_string(e.epoch), std::to_string(e.partition), fmt_double(e.mbps),
                             std::string(to_string(e.policy)), std::to_string(e.items),
                             fmt_double(e.compressed_fraction), fmt_double(e.speedup)});
    }
}

void write_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
    const auto& m = report.meta;
    json doc;
    doc["dataset"] = m.dataset;
    doc["config_hash"] = m.config_hash;
    doc["codec_id"] = m.codec_id;
    doc["mode"] = m.mode;
    doc["seed"] = m.seed;
    doc["threshold"] = {{"min_size_bytes", m.min_size_bytes}, {"excluded_labels", m.excluded_labels}};
    doc["estimator"] = {{"decay", m.estimator_decay}, {"warmup", m.estimator_warmup}, {"prior", m.estimator_prior}};
    doc["grouping"] = m.grouping;
    auto& rows = doc["rows"] = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"condition", r.condition},
                        {"policy", to_string(r.policy)},
                        {"items", r.items},
                        {"groups", r.groups},
                        {"total_s", r.total_s},
                        {"decompression_s", r.decompression_s},
                        {"bytes_on_wire", r.bytes_on_wire},
                        {"speedup", r.speedup},
                        {"speedup_se", r.speedup_se},
                        {"data_usage", r.data_usage},
                        {"breakdown",
                         {{"overhead", r.fractions.overhead},
                          {"compression", r.fractions.compression},
                          {"transmission", r.fractions.transmission}}},
                        {"compressed_frac", r.compressed_fraction},
                        {"confusion",
                         {{"success_rate", r.accuracy.success_rate},
                          {"false_positive_rate", r.accuracy.false_positive_rate},
                          {"false_negative_rate", r.accuracy.false_negative_rate}}},
                        {"win_vs_uncompressed", r.win_vs_uncompressed},
                        {"win_vs_compressed", r.win_vs_compressed}});
    }
    auto& epochs = doc["epochs"] = json::array();
    for (const auto& e : report.epochs) {
        epochs.push_back({{"condition", e.condition},
                          {"epoch", e.epoch},
                          {"mbps", e.mbps},
                          {"policy", to_string(e.policy)},
                          {"compressed_frac", e.compressed_fraction},
                          {"speedup", e.speedup}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

void write_outcomes_jsonl(const std::vector<ConditionResult>& conditions, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& c : conditions) {
        for (const auto& run : c.runs) {
            const PolicyRun& r = run.policy == PolicyKind::Uncompressed ? c.baseline : run;
            for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
                const auto& o = r.outcomes[i];
                json j{{"condition", c.condition},
                       {"policy", to_string(r.policy)},
                       {"item", o.item_id},
                       {"action", to_string(o.action_taken)},
                       {"reason", to_string(r.decisions[i].reason)},
                       {"original_bytes", o.original_bytes},
                       {"bytes_on_wire", o.bytes_on_wire},
                       {"overhead", o.overhead},
                       {"compression_time", o.compression_time},
                       {"transmission_time", o.transmission_time},
                       {"decompression_time", o.decompression_time},
                       {"total", o.total}};
                if (o.codec_fallback) j["codec_fallback"] = true;
                if (!o.integrity_ok) j["integrity_ok"] = false;
                out << j.dump() << '\n';
            }
        }
    }
}

void write_oracle_jsonl(const std::vector<ConditionResult>& conditions, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& c : conditions) {
        for (const auto& m : c.oracle) {
            out << json{{"condition", c.condition},
                        {"item", m.item_id},
                        {"raw_total", m.raw_total},
                        {"compressed_total", m.compressed_total},
                        {"raw_bytes", m.raw_bytes},
                        {"compressed_bytes", m.compressed_bytes},
                        {"decision", to_string(time_oracle(m).action)}}
                       .dump()
                << '\n';
        }
    }
}

}  // namespace selzip
