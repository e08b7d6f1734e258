#include "selzip/link.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "selzip/error.hpp"

namespace selzip {

void LinkSpec::validate() const {
    if (!std::isfinite(bandwidth) || bandwidth <= 0.0) throw InvalidArgumentError("link bandwidth must be positive");
    if (!std::isfinite(rtt) || rtt < 0.0) throw InvalidArgumentError("link rtt must be non-negative");
    if (!(jitter_fraction >= 0.0 && jitter_fraction < 1.0))
        throw InvalidArgumentError("link jitter fraction must be in [0, 1)");
}

double transmission_time(std::uint64_t bytes, const LinkSpec& link) {
    return link.rtt + static_cast<double>(bytes) / link.bandwidth;
}

double transmission_time(std::uint64_t bytes, const LinkSpec& link, std::mt19937_64& rng) {
    double base = transmission_time(bytes, link);
    if (link.jitter_fraction == 0.0) return base;
    double u = (2.0 * unit_uniform(rng) - 1.0) * link.jitter_fraction;
    return base * (1.0 + u);
}

const Epoch& EpochSchedule::epoch_for(std::size_t index) const {
    auto it = std::upper_bound(epochs.begin(), epochs.end(), index,
                               [](std::size_t i, const Epoch& e) { return i < e.end; });
    if (it == epochs.end()) throw InvalidArgumentError("item index outside the schedule");
    return *it;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> equal_count_bounds(std::size_t n, std::size_t parts) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(parts);
    for (std::size_t p = 0; p < parts; ++p) out.emplace_back(n * p / parts, n * (p + 1) / parts);
    return out;
}

}  // namespace

EpochSchedule make_schedule(std::size_t dataset_size, std::size_t n_partitions,
                            const std::vector<LinkSpec>& levels, std::uint64_t seed) {
    if (n_partitions == 0) throw InvalidArgumentError("n_partitions must be positive");
    if (levels.empty()) throw InvalidArgumentError("at least one link level is required");
    for (const auto& l : levels) l.validate();

    std::mt19937_64 rng(seed);
    EpochSchedule s;
    s.seed = seed;
    std::size_t p = 0;
    for (auto [b, e] : equal_count_bounds(dataset_size, n_partitions)) {
        auto pick = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(levels.size()));
        s.epochs.push_back(Epoch{p++, levels[std::min(pick, levels.size() - 1)], b, e});
    }
    return s;
}

EpochSchedule make_fixed_sequence(std::size_t dataset_size, const std::vector<LinkSpec>& links,
                                  std::uint64_t seed) {
    if (links.empty()) throw InvalidArgumentError("at least one link is required");
    for (const auto& l : links) l.validate();
    EpochSchedule s;
    s.seed = seed;
    std::size_t p = 0;
    for (auto [b, e] : equal_count_bounds(dataset_size, links.size())) {
        s.epochs.push_back(Epoch{p, links[p], b, e});
        ++p;
    }
    return s;
}

void save_schedule(const EpochSchedule& schedule, const std::vector<double>& levels_mbps,
                   const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["seed"] = schedule.seed;
    doc["levels_mbps"] = levels_mbps;
    doc["n_partitions"] = schedule.epochs.size();
    auto& epochs = doc["epochs"] = nlohmann::json::array();
    for (const auto& e : schedule.epochs) {
        epochs.push_back({{"partition", e.partition_index},
                          {"mbps", e.link.mbps()},
                          {"rtt", e.link.rtt},
                          {"jitter", e.link.jitter_fraction},
                          {"begin", e.begin},
                          {"end", e.end}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write schedule " + path.string());
    out << doc.dump(2) << '\n';
}

TokenBucket::TokenBucket(double rate, double capacity, double now, double initial)
    : rate_(rate), capacity_(capacity), tokens_(initial < 0.0 ? capacity : std::min(initial, capacity)), last_(now) {
    if (!(rate > 0.0) || !(capacity > 0.0)) throw InvalidArgumentError("token bucket needs positive rate and capacity");
}

double TokenBucket::reserve(std::uint64_t n, double now) {
    if (now > last_) {
        tokens_ = std::min(capacity_, tokens_ + (now - last_) * rate_);
        last_ = now;
    }
    tokens_ -= static_cast<double>(n);
    return tokens_ >= 0.0 ? 0.0 : -tokens_ / rate_;
}

namespace {

double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

ShapedWriter::ShapedWriter(const LinkSpec& link, Sink inner, std::size_t bucket_bytes)
    : inner_(std::move(inner)),
      bucket_(link.bandwidth, static_cast<double>(bucket_bytes), steady_seconds(), 0.0),
      chunk_(std::max<std::size_t>(bucket_bytes / 4, 1)) {
    link.validate();
}

bool ShapedWriter::write(const char* data, std::size_t len) {
    std::lock_guard lock(mu_);
    while (len > 0) {
        std::size_t n = std::min(len, chunk_);
        double wait = bucket_.reserve(n, steady_seconds());
        if (wait > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        if (!inner_(data, n)) return false;
        data += n;
        len -= n;
    }
    return true;
}

}  // namespace selzip
