#include "selzip/codec.hpp"

#include <zlib.h>

#include <limits>

#include "selzip/error.hpp"

namespace selzip {

namespace {

constexpr std::size_t kInflateChunk = 64 * 1024;

uInt clamp_chunk(std::size_t n) {
    return static_cast<uInt>(std::min<std::size_t>(n, std::numeric_limits<uInt>::max()));
}

}  // namespace

DeflateCodec::DeflateCodec(int level) : level_(level) {
    if (level < 0 || level > 9) throw InvalidArgumentError("deflate level must be in [0, 9]");
}

Bytes DeflateCodec::compress(ByteView input) const {
    Bytes out(compressBound(static_cast<uLong>(input.size())));
    uLongf out_len = static_cast<uLongf>(out.size());
    int rc = compress2(out.data(), &out_len, input.data(), static_cast<uLong>(input.size()), level_);
    if (rc != Z_OK) throw CodecError("deflate failed with zlib status " + std::to_string(rc));
    out.resize(out_len);
    return out;
}

Bytes DeflateCodec::decompress(ByteView input) const {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw CodecError("inflateInit failed");

    Bytes out;
    zs.next_in = const_cast<Bytef*>(input.data());
    std::size_t remaining = input.size();
    zs.avail_in = clamp_chunk(remaining);
    remaining -= zs.avail_in;

    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        std::size_t old = out.size();
        out.resize(old + kInflateChunk);
        zs.next_out = out.data() + old;
        zs.avail_out = static_cast<uInt>(kInflateChunk);
        rc = inflate(&zs, Z_NO_FLUSH);
        out.resize(out.size() - zs.avail_out);
        if (rc == Z_STREAM_END) break;
        if (rc != Z_OK && rc != Z_BUF_ERROR) {
            std::string msg = zs.msg ? zs.msg : "status " + std::to_string(rc);
            inflateEnd(&zs);
            throw CodecError("inflate failed: " + msg);
        }
        if (zs.avail_in == 0) {
            if (remaining == 0) {
                inflateEnd(&zs);
                throw CodecError("inflate failed: truncated stream");
            }
            zs.avail_in = clamp_chunk(remaining);
            remaining -= zs.avail_in;
        }
    }
    bool trailing = zs.avail_in != 0 || remaining != 0;
    inflateEnd(&zs);
    if (trailing) throw CodecError("inflate failed: trailing bytes after stream end");
    return out;
}

std::unique_ptr<Codec> make_codec(std::string_view id) {
    if (id == "deflate") return std::make_unique<DeflateCodec>();
    if (id == "identity") return std::make_unique<IdentityCodec>();
    return nullptr;
}

std::uint32_t crc32_of(ByteView data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t off = 0;
    while (off < data.size()) {
        uInt n = clamp_chunk(data.size() - off);
        crc = crc32(crc, data.data() + off, n);
        off += n;
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace selzip
