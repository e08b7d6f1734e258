#include "selzip/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "selzip/error.hpp"

namespace selzip {

using nlohmann::json;

const TypeModel& ModelSet::model_for(const DataTypeLabel& label) const {
    auto it = per_label.find(label);
    return it == per_label.end() ? global_fallback : it->second;
}

TrainingSample measure_sample(ByteView payload, const DataTypeLabel& label, const Codec& codec,
                              int repeats) {
    repeats = std::max(repeats, 3);
    std::vector<double> latencies;
    latencies.reserve(static_cast<std::size_t>(repeats));
    std::uint64_t compressed_size = 0;
    for (int i = 0; i < repeats; ++i) {
        auto start = std::chrono::steady_clock::now();
        Bytes out = codec.compress(payload);
        auto stop = std::chrono::steady_clock::now();
        latencies.push_back(std::chrono::duration<double>(stop - start).count());
        compressed_size = out.size();
    }
    auto mid = latencies.begin() + latencies.size() / 2;
    std::nth_element(latencies.begin(), mid, latencies.end());
    return TrainingSample{label, payload.size(), compressed_size, *mid};
}

TypeModel fit_type_model(const std::vector<TrainingSample>& samples) {
    if (samples.empty()) throw DegenerateFitError("no samples to fit");

    double total_original = 0.0;
    double total_compressed = 0.0;
    for (const auto& s : samples) {
        total_original += static_cast<double>(s.original_size);
        total_compressed += static_cast<double>(s.compressed_size);
    }
    if (total_original <= 0.0 || total_compressed <= 0.0)
        throw DegenerateFitError("all sample sizes are zero for '" + samples.front().label.str() + "'");

    TypeModel m;
    m.label = samples.front().label;
    m.compressibility = total_original / total_compressed;

    const double n = static_cast<double>(samples.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& s : samples) {
        mean_x += static_cast<double>(s.original_size);
        mean_y += s.compression_latency;
    }
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& s : samples) {
        double dx = static_cast<double>(s.original_size) - mean_x;
        sxx += dx * dx;
        sxy += dx * (s.compression_latency - mean_y);
    }

    if (samples.size() < 2 || sxx == 0.0) {
        m.alpha = 0.0;
        m.beta = std::max(mean_y, 0.0);
        return m;
    }

    m.alpha = sxy / sxx;
    m.beta = mean_y - m.alpha * mean_x;
    if (m.alpha < 0.0) {
        m.alpha = 0.0;
        m.beta = std::max(mean_y, 0.0);
    } else if (m.beta < 0.0) {
        // Refit through the origin; the slope stays non-negative because all
        // sizes and latencies are.
        double sx2 = 0.0;
        double sxy0 = 0.0;
        for (const auto& s : samples) {
            double x = static_cast<double>(s.original_size);
            sx2 += x * x;
            sxy0 += x * s.compression_latency;
        }
        m.alpha = sxy0 / sx2;
        m.beta = 0.0;
    }
    return m;
}

namespace {

std::string utc_now_iso8601() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json model_to_json(const TypeModel& m) {
    return json{{"label", m.label.str()},
                {"alpha", m.alpha},
                {"beta", m.beta},
                {"compressibility", m.compressibility}};
}

TypeModel model_from_json(const json& j) {
    TypeModel m;
    m.label = DataTypeLabel(j.at("label").get<std::string>());
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.compressibility = j.at("compressibility").get<double>();
    m.validate();
    return m;
}

}  // namespace

ModelSet fit_model_set(const std::vector<TrainingSample>& samples, std::string codec_id) {
    if (samples.empty()) throw DegenerateFitError("empty usable corpus");
    std::map<DataTypeLabel, std::vector<TrainingSample>> by_label;
    for (const auto& s : samples) by_label[s.label].push_back(s);

    ModelSet set;
    set.codec_id = std::move(codec_id);
    set.trained_at = utc_now_iso8601();
    for (const auto& [label, group] : by_label) set.per_label.emplace(label, fit_type_model(group));

    std::vector<TrainingSample> all = samples;
    for (auto& s : all) s.label = DataTypeLabel("global");
    set.global_fallback = fit_type_model(all);
    return set;
}

ModelSet train_corpus(const std::vector<ManifestEntry>& manifest, const Codec& codec,
                      std::vector<std::string>* warnings) {
    if (manifest.empty()) throw PreconditionError("corpus manifest is empty");
    std::vector<TrainingSample> samples;
    samples.reserve(manifest.size());
    for (const auto& entry : manifest) {
        try {
            Bytes payload = read_file(entry.path);
            samples.push_back(measure_sample(payload, entry.label, codec));
        } catch (const Error& e) {
            if (warnings) warnings->push_back("skipped " + entry.path.string() + ": " + e.what());
        }
    }
    if (samples.empty()) throw PreconditionError("no readable corpus entries");
    return fit_model_set(samples, codec.id());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest " + manifest_path.string());
    const auto base = manifest_path.parent_path();
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            ManifestEntry e;
            std::filesystem::path p = j.at("path").get<std::string>();
            e.path = p.is_absolute() ? p : base / p;
            e.label = DataTypeLabel(j.at("label").get<std::string>());
            e.group = j.value("group", std::string{});
            entries.push_back(std::move(e));
        } catch (const json::exception& ex) {
            throw FormatError(manifest_path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return entries;
}

void write_manifest(const std::filesystem::path& manifest_path, const std::vector<ManifestEntry>& entries) {
    std::ofstream out(manifest_path);
    if (!out) throw IoError("cannot write manifest " + manifest_path.string());
    const auto base = manifest_path.parent_path();
    for (const auto& e : entries) {
        json j{{"path", e.path.lexically_relative(base).generic_string()}, {"label", e.label.str()}};
        if (!e.group.empty()) j["group"] = e.group;
        out << j.dump() << '\n';
    }
}

void save_model_set(const ModelSet& models, const std::filesystem::path& path) {
    json doc;
    doc["codec_id"] = models.codec_id;
    doc["trained_at"] = models.trained_at;
    doc["models"] = json::array();
    for (const auto& [label, m] : models.per_label) doc["models"].push_back(model_to_json(m));
    doc["global_fallback"] = model_to_json(models.global_fallback);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model set " + path.string());
    out << doc.dump(2) << '\n';
}

ModelSet load_model_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model set " + path.string());
    try {
        json doc = json::parse(in);
        ModelSet set;
        set.codec_id = doc.at("codec_id").get<std::string>();
        set.trained_at = doc.value("trained_at", std::string{});
        for (const auto& jm : doc.at("models")) {
            TypeModel m = model_from_json(jm);
            set.per_label.emplace(m.label, m);
        }
        set.global_fallback = model_from_json(doc.at("global_fallback"));
        return set;
    } catch (const json::exception& ex) {
        throw FormatError(path.string() + ": " + ex.what());
    }
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, ByteView data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + path.string());
}

}  // namespace selzip
