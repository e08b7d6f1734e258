#include "selzip/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "selzip/error.hpp"
#include "selzip/link.hpp"

namespace selzip {

namespace {

// Vocabulary shared by every text-like payload. Its shape sets the deflate
// ratio together with the phrase-repeat rate below; these values put text
// around 4 at level 6 for payloads of tens of KiB and up.
constexpr std::size_t kVocabulary = 2000;
constexpr double kZipfExponent = 1.1;
constexpr double kPhraseRepeat = 0.08;
constexpr std::uint64_t kVocabularySeed = 0x5e1e'c71f'0000'0001ULL;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Vocabulary {
    std::vector<std::string> words;
    std::vector<double> cumulative;

    Vocabulary() {
        std::mt19937_64 rng(kVocabularySeed);
        static constexpr std::string_view kLetters = "etaoinshrdlcumwfgypbvkjxqz";
        words.reserve(kVocabulary);
        cumulative.reserve(kVocabulary);
        double acc = 0.0;
        for (std::size_t rank = 0; rank < kVocabulary; ++rank) {
            auto len = 2 + static_cast<std::size_t>(unit_uniform(rng) * 9.0);
            std::string w;
            for (std::size_t i = 0; i < len; ++i) {
                // Squaring skews letter choice toward the frequent end.
                double u = unit_uniform(rng);
                w.push_back(kLetters[static_cast<std::size_t>(u * u * kLetters.size())]);
            }
            words.push_back(std::move(w));
            acc += 1.0 / std::pow(static_cast<double>(rank + 1), kZipfExponent);
            cumulative.push_back(acc);
        }
    }

    const std::string& draw(std::mt19937_64& rng) const {
        double target = unit_uniform(rng) * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        return words[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), words.size() - 1)];
    }
};

const Vocabulary& vocabulary() {
    static const Vocabulary v;
    return v;
}

Bytes make_text(std::uint64_t size, std::mt19937_64& rng) {
    const auto& vocab = vocabulary();
    std::string out;
    out.reserve(size + 16);
    std::size_t in_sentence = 0;
    while (out.size() < size) {
        if (out.size() > 256 && unit_uniform(rng) < kPhraseRepeat) {
            // Re-use an earlier phrase, as markup and prose do.
            auto len = 12 + static_cast<std::size_t>(unit_uniform(rng) * 40.0);
            auto window = std::min<std::size_t>(out.size() - len, 16 * 1024);
            auto from = out.size() - len - static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(window));
            out.append(out, from, len);
            out += ' ';
            continue;
        }
        if (unit_uniform(rng) < 0.04) {
            out += std::to_string(static_cast<int>(unit_uniform(rng) * 10000.0));
        } else {
            out += vocab.draw(rng);
        }
        ++in_sentence;
        if (in_sentence > 6 && unit_uniform(rng) < 0.12) {
            out += unit_uniform(rng) < 0.3 ? ".\n" : ". ";
            in_sentence = 0;
        } else if (unit_uniform(rng) < 0.05) {
            out += ", ";
        } else {
            out += ' ';
        }
    }
    out.resize(size);
    return Bytes(out.begin(), out.end());
}

Bytes make_random(std::uint64_t size, std::mt19937_64& rng) {
    Bytes out(size);
    std::size_t i = 0;
    while (i < size) {
        std::uint64_t v = rng();
        for (int b = 0; b < 8 && i < size; ++b, ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * b));
    }
    return out;
}

Bytes make_tiny(std::mt19937_64& rng) {
    // A short batch of air-quality style readings.
    std::string out;
    auto records = 1 + static_cast<int>(unit_uniform(rng) * 4.0);
    char line[96];
    for (int r = 0; r < records; ++r) {
        int n = std::snprintf(line, sizeof line, "%lld,%.1f,%.1f,%.2f,%d\n",
                              1500000000LL + static_cast<long long>(unit_uniform(rng) * 1e8),
                              15.0 + unit_uniform(rng) * 20.0, 20.0 + unit_uniform(rng) * 60.0,
                              unit_uniform(rng) * 5.0, static_cast<int>(unit_uniform(rng) * 500.0));
        if (out.size() + static_cast<std::size_t>(n) > kTinyMaxBytes) break;
        out.append(line, static_cast<std::size_t>(n));
    }
    return Bytes(out.begin(), out.end());
}

std::uint64_t draw_size(const SyntheticParams& p, std::mt19937_64& rng) {
    if (p.min_size == p.max_size) return p.min_size;
    double lo = std::log(static_cast<double>(std::max<std::uint64_t>(p.min_size, 1)));
    double hi = std::log(static_cast<double>(p.max_size));
    return static_cast<std::uint64_t>(std::llround(std::exp(lo + unit_uniform(rng) * (hi - lo))));
}

}  // namespace

std::string_view to_string(ContentClass c) {
    switch (c) {
        case ContentClass::TextLike: return "text-like";
        case ContentClass::PrecompressedLike: return "precompressed-like";
        case ContentClass::Tiny: return "tiny";
    }
    return "unknown";
}

ContentClass parse_content_class(std::string_view s) {
    if (s == "text-like") return ContentClass::TextLike;
    if (s == "precompressed-like") return ContentClass::PrecompressedLike;
    if (s == "tiny") return ContentClass::Tiny;
    throw InvalidArgumentError("unknown content class '" + std::string(s) + "'");
}

void SyntheticParams::validate() const {
    if (mix.empty()) throw InvalidArgumentError("synthetic corpus needs at least one label");
    if (count == 0) throw InvalidArgumentError("synthetic corpus needs a positive item count");
    if (min_size > max_size) throw InvalidArgumentError("min_size exceeds max_size");
    if (group_size == 0) throw InvalidArgumentError("group_size must be positive");
    double total = 0.0;
    for (const auto& m : mix) {
        if (!(m.weight >= 0.0)) throw InvalidArgumentError("label weights must be non-negative");
        total += m.weight;
    }
    if (total <= 0.0) throw InvalidArgumentError("label weights sum to zero");
}

SyntheticParams preset_params(std::string_view profile, std::size_t count, std::uint64_t seed) {
    SyntheticParams p;
    p.count = count;
    p.seed = seed;
    if (profile == "text") {
        p.mix = {{DataTypeLabel("text"), ContentClass::TextLike, 1.0}};
    } else if (profile == "random") {
        p.mix = {{DataTypeLabel("image"), ContentClass::PrecompressedLike, 1.0}};
    } else if (profile == "tiny") {
        p.mix = {{DataTypeLabel("sensor"), ContentClass::Tiny, 1.0}};
    } else if (profile == "mixed") {
        p.mix = {{DataTypeLabel("text"), ContentClass::TextLike, 0.35},
                 {DataTypeLabel("script"), ContentClass::TextLike, 0.15},
                 {DataTypeLabel("image"), ContentClass::PrecompressedLike, 0.3},
                 {DataTypeLabel("sensor"), ContentClass::Tiny, 0.2}};
    } else {
        throw InvalidArgumentError("unknown corpus profile '" + std::string(profile) + "'");
    }
    return p;
}

Bytes make_payload(ContentClass content, std::uint64_t size, std::mt19937_64& rng) {
    switch (content) {
        case ContentClass::TextLike: return make_text(size, rng);
        case ContentClass::PrecompressedLike: return make_random(size, rng);
        case ContentClass::Tiny: return make_tiny(rng);
    }
    return {};
}

std::vector<ManifestEntry> generate_corpus(const SyntheticParams& params, const std::filesystem::path& out_dir) {
    params.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "payloads");

    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& m : params.mix) cumulative.push_back(acc += m.weight);

    std::vector<ManifestEntry> entries;
    entries.reserve(params.count);
    std::mt19937_64 picker(splitmix64(params.seed));
    for (std::size_t i = 0; i < params.count; ++i) {
        double u = unit_uniform(picker) * acc;
        auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                          cumulative.begin());
        const LabelMix& mix = params.mix[std::min(k, params.mix.size() - 1)];

        std::mt19937_64 rng(splitmix64(params.seed ^ splitmix64(i + 1)));
        Bytes payload = make_payload(mix.content, draw_size(params, rng), rng);

        char name[32];
        std::snprintf(name, sizeof name, "item-%05zu.bin", i);
        fs::path path = out_dir / "payloads" / name;
        write_file(path, payload);

        char group[24];
        std::snprintf(group, sizeof group, "g%03zu", i / params.group_size);
        entries.push_back(ManifestEntry{path, mix.label, group});
    }
    write_manifest(out_dir / "manifest.jsonl", entries);
    return entries;
}

}  // namespace selzip
