#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "selzip/codec.hpp"
#include "selzip/label.hpp"
#include "selzip/training.hpp"

namespace selzip {

enum class ContentClass : std::uint8_t {
    TextLike,           // skewed word distribution, deflate ratio ~4
    PrecompressedLike,  // seeded random bytes, ratio ~1
    Tiny,               // short sensor records of at most 256 bytes
};

std::string_view to_string(ContentClass c);
ContentClass parse_content_class(std::string_view s);

struct LabelMix {
    DataTypeLabel label;
    ContentClass content;
    double weight = 1.0;
};

struct SyntheticParams {
    std::vector<LabelMix> mix;
    std::uint64_t min_size = 8 * 1024;
    std::uint64_t max_size = 256 * 1024;
    std::size_t count = 100;
    std::uint64_t seed = 1;
    std::size_t group_size = 25;  // consecutive items forming one benchmark group

    void validate() const;
};

/// Named mixes: "text", "random", "tiny", "mixed".
SyntheticParams preset_params(std::string_view profile, std::size_t count, std::uint64_t seed);

inline constexpr std::uint64_t kTinyMaxBytes = 256;

/// Generates one payload of roughly `size` bytes (Tiny ignores `size`).
/// Deterministic in (class, size, rng state).
Bytes make_payload(ContentClass content, std::uint64_t size, std::mt19937_64& rng);

/// Writes payloads under `out_dir/payloads/` and `out_dir/manifest.jsonl`.
/// Byte-identical output for identical params.
std::vector<ManifestEntry> generate_corpus(const SyntheticParams& params, const std::filesystem::path& out_dir);

}  // namespace selzip
