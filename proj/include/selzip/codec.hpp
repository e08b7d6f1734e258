#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selzip {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Compression codec seam. Implementations must be stateless between calls
/// so one instance can be shared across threads.
class Codec {
public:
    virtual ~Codec() = default;

    /// Wire identifier, e.g. "deflate" or "identity".
    virtual std::string id() const = 0;

    virtual Bytes compress(ByteView input) const = 0;

    /// Throws CodecError on corrupt or truncated input.
    virtual Bytes decompress(ByteView input) const = 0;
};

/// zlib-container DEFLATE.
class DeflateCodec final : public Codec {
public:
    explicit DeflateCodec(int level = 6);

    std::string id() const override { return "deflate"; }
    Bytes compress(ByteView input) const override;
    Bytes decompress(ByteView input) const override;

    int level() const noexcept { return level_; }

private:
    int level_;
};

class IdentityCodec final : public Codec {
public:
    std::string id() const override { return "identity"; }
    Bytes compress(ByteView input) const override { return {input.begin(), input.end()}; }
    Bytes decompress(ByteView input) const override { return {input.begin(), input.end()}; }
};

/// Resolves a wire identifier; returns nullptr for unknown ids.
std::unique_ptr<Codec> make_codec(std::string_view id);

/// CRC-32 of a buffer, used for end-to-end integrity acknowledgments.
std::uint32_t crc32_of(ByteView data);

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace selzip
