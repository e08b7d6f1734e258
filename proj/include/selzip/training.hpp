#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "selzip/codec.hpp"
#include "selzip/label.hpp"
#include "selzip/policy.hpp"

namespace selzip {

struct TrainingSample {
    DataTypeLabel label{"global"};
    std::uint64_t original_size = 0;
    std::uint64_t compressed_size = 0;
    double compression_latency = 0.0;  // seconds
};

/// Trained per-type models plus the corpus-wide fallback used for labels
/// never seen in training.
struct ModelSet {
    std::map<DataTypeLabel, TypeModel> per_label;
    TypeModel global_fallback;
    std::string codec_id;
    std::string trained_at;  // ISO-8601 UTC

    const TypeModel& model_for(const DataTypeLabel& label) const;
};

/// One corpus manifest record. `path` is resolved relative to the manifest.
struct ManifestEntry {
    std::filesystem::path path;
    DataTypeLabel label{"global"};
    std::string group;
};

/// Compresses `payload` `repeats` times (at least 3) and records the median
/// wall-clock latency measured on a monotonic clock.
TrainingSample measure_sample(ByteView payload, const DataTypeLabel& label, const Codec& codec,
                              int repeats = 3);

/// Least-squares latency fit and size-weighted compressibility for one label.
TypeModel fit_type_model(const std::vector<TrainingSample>& samples);

/// Fits one model per label plus the global fallback.
ModelSet fit_model_set(const std::vector<TrainingSample>& samples, std::string codec_id);

/// Reads and measures every manifest entry. Unreadable entries are skipped
/// and reported through `warnings` when given.
ModelSet train_corpus(const std::vector<ManifestEntry>& manifest, const Codec& codec,
                      std::vector<std::string>* warnings = nullptr);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const std::filesystem::path& manifest_path, const std::vector<ManifestEntry>& entries);

void save_model_set(const ModelSet& models, const std::filesystem::path& path);
ModelSet load_model_set(const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView data);

}  // namespace selzip
