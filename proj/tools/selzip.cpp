// selzip: selective-compression experiment harness.
//
//   selzip gen    --out corpus --profile mixed --count 500 --seed 7
//   selzip train  --manifest corpus/manifest.jsonl --out corpus/models.json
//   selzip oracle --manifest corpus/manifest.jsonl --out results
//   selzip run    --manifest corpus/manifest.jsonl --models corpus/models.json --out results
//   selzip report --in results
//   selzip serve  --port 8080

#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "selzip/harness.hpp"
#include "selzip/transfer.hpp"

namespace {

using namespace selzip;
namespace fs = std::filesystem;

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

std::vector<double> parse_levels(const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split_csv(s)) {
        try {
            out.push_back(std::stod(p));
        } catch (const std::exception&) {
            throw InvalidArgumentError("not a number: '" + p + "'");
        }
    }
    return out;
}

struct ExperimentFlags {
    std::string manifest;
    std::string models;
    std::string measurements;
    std::string out = "results";
    std::string name = "corpus";
    std::string mbps = "2,5,10";
    std::string sequence;
    std::string policies = "uncompressed,compressed,selective,oracle";
    std::string exclude = "image,audio,video";
    bool dynamic = false;
    std::size_t partitions = 4;
    std::uint64_t seed = 1;
    double rtt = 0.0;
    double jitter = 0.0;
    std::uint64_t min_size = 4096;
    double decay = 0.05;
    std::uint64_t warmup = 1;
    double prior_mbps = 5.0;
    bool live = false;
    std::string endpoint;

    void attach(CLI::App* app, bool with_policies) {
        app->add_option("--manifest", manifest, "Corpus manifest (JSON lines)")->required();
        app->add_option("--out", out, "Output directory");
        app->add_option("--measurements", measurements,
                        "Codec measurement log (default <out>/measurements.json; created when absent)");
        app->add_option("--mbps", mbps, "Comma-separated link levels in Mbps");
        app->add_flag("--dynamic", dynamic, "Epoch schedule instead of fixed levels");
        app->add_option("--partitions", partitions, "Number of epochs for --dynamic");
        app->add_option("--sequence", sequence, "Explicit per-epoch Mbps sequence for --dynamic");
        app->add_option("--seed", seed, "Seed for schedules and link jitter");
        app->add_option("--rtt", rtt, "Link round-trip time in seconds");
        app->add_option("--jitter", jitter, "Link jitter fraction in [0,1)");
        app->add_flag("--live", live, "Send real payloads over a shaped localhost link");
        app->add_option("--endpoint", endpoint, "host:port of a running `selzip serve` for --live");
        if (!with_policies) return;
        app->add_option("--models", models, "Trained model set (JSON)");
        app->add_option("--name", name, "Dataset name used in reports");
        app->add_option("--policies", policies, "Comma-separated subset of uncompressed,compressed,selective,oracle");
        app->add_option("--min-size", min_size, "Threshold gate: minimum size in bytes");
        app->add_option("--exclude", exclude, "Threshold gate: comma-separated excluded labels");
        app->add_option("--decay", decay, "Throughput estimator EWMA decay");
        app->add_option("--warmup", warmup, "Samples before the estimator replaces its prior");
        app->add_option("--prior-mbps", prior_mbps, "Throughput estimate before any sample, in Mbps");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig c;
        c.dataset = name;
        c.corpus.mode = CorpusMode::Manifest;
        c.corpus.manifest_path = manifest;
        c.models = models;
        c.out_dir = out;
        c.measurements = measurements.empty() ? fs::path(out) / "measurements.json" : fs::path(measurements);
        c.levels_mbps = parse_levels(mbps);
        c.sequence_mbps = parse_levels(sequence);
        c.dynamic = dynamic || !c.sequence_mbps.empty();
        c.partitions = partitions;
        c.seed = seed;
        c.rtt = rtt;
        c.jitter = jitter;
        c.policies.clear();
        for (const auto& p : split_csv(policies)) c.policies.push_back(parse_policy(p));
        c.policy.min_size_bytes = min_size;
        c.policy.excluded_labels.clear();
        for (const auto& l : split_csv(exclude)) c.policy.excluded_labels.insert(DataTypeLabel(l));
        c.estimator.decay = decay;
        c.estimator.warmup = warmup;
        c.estimator.prior = mbps_to_bytes_per_second(prior_mbps);
        c.policy.default_throughput = c.estimator.prior;
        c.live = live;
        c.endpoint = endpoint;
        return c;
    }
};

void print_error(const std::string& kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selective compression decision engine and experiment harness"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
    std::string gen_out = "corpus";
    std::string profile = "mixed";
    std::size_t count = 500;
    std::uint64_t gen_seed = 1;
    std::uint64_t min_bytes = 8 * 1024;
    std::uint64_t max_bytes = 256 * 1024;
    std::size_t group_size = 25;
    std::vector<std::string> mixes;
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_option("--profile", profile, "text | random | tiny | mixed");
    gen->add_option("--count", count, "Number of items");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--min-bytes", min_bytes, "Smallest generated item");
    gen->add_option("--max-bytes", max_bytes, "Largest generated item");
    gen->add_option("--group-size", group_size, "Items per benchmark group");
    gen->add_option("--mix", mixes, "label:class:weight (class: text-like, precompressed-like, tiny); repeatable");

    auto* train = app.add_subcommand("train", "Fit per-type models on a corpus");
    std::string train_manifest;
    std::string train_out;
    train->add_option("--manifest", train_manifest, "Corpus manifest")->required();
    train->add_option("--out", train_out, "Model set path (default: models.json next to the manifest)");

    ExperimentFlags oracle_flags;
    auto* oracle = app.add_subcommand("oracle", "Dual-measurement pass for the time oracle");
    oracle_flags.attach(oracle, false);

    ExperimentFlags run_flags;
    auto* run = app.add_subcommand("run", "Run the policy comparison and write reports");
    run_flags.attach(run, true);

    auto* report = app.add_subcommand("report", "Print a summary of report.json");
    std::string report_in = "results";
    report->add_option("--in", report_in, "Results directory or report.json");

    auto* serve = app.add_subcommand("serve", "Run the decompressing endpoint");
    std::string host = "0.0.0.0";
    int port = 8080;
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Bind port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (*gen) {
            SyntheticParams params = preset_params(profile, count, gen_seed);
            if (!mixes.empty()) {
                params.mix.clear();
                for (const auto& m : mixes) {
                    if (m.find(':') == std::string::npos)
                        throw InvalidArgumentError("--mix expects label:class:weight");
                    auto rest = m.substr(m.find(':') + 1);
                    auto colon = rest.find(':');
                    if (colon == std::string::npos) throw InvalidArgumentError("--mix expects label:class:weight");
                    params.mix.push_back(LabelMix{DataTypeLabel(m.substr(0, m.find(':'))),
                                                  parse_content_class(rest.substr(0, colon)),
                                                  std::stod(rest.substr(colon + 1))});
                }
            }
            params.min_size = min_bytes;
            params.max_size = max_bytes;
            params.group_size = group_size;
            auto entries = cmd_gen(params, gen_out);
            std::cout << "wrote " << entries.size() << " items to " << (fs::path(gen_out) / "manifest.jsonl").string()
                      << '\n';
        } else if (*train) {
            fs::path out = train_out.empty() ? fs::path(train_manifest).parent_path() / "models.json" : fs::path(train_out);
            std::vector<std::string> warnings;
            ModelSet models = cmd_train(train_manifest, out, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
            std::cout << "trained " << models.per_label.size() << " type models -> " << out.string() << '\n';
        } else if (*oracle) {
            auto results = cmd_oracle(oracle_flags.resolve());
            for (const auto& c : results) {
                std::size_t compress = 0;
                for (const auto& m : c.oracle) compress += time_oracle(m).action == Action::Compress ? 1 : 0;
                std::cout << c.condition << ": oracle compresses " << compress << "/" << c.oracle.size() << " items\n";
            }
        } else if (*run) {
            ExperimentConfig config = run_flags.resolve();
            cmd_run(config);
            std::cout << cmd_report(config.out_dir / "report.json");
        } else if (*report) {
            fs::path in = report_in;
            if (fs::is_directory(in)) in /= "report.json";
            std::cout << cmd_report(in);
        } else if (*serve) {
            TransferServer server;
            std::cout << "listening on " << host << ":" << port << std::endl;
            server.run(host, port);
        }
    } catch (const Error& e) {
        print_error(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
