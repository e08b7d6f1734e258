#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "selzip/codec.hpp"
#include "selzip/error.hpp"
#include "selzip/link.hpp"
#include "selzip/policy.hpp"
#include "selzip/throughput.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace selzip {

inline constexpr std::string_view kCodecHeader = "X-Selzip-Codec";
inline constexpr std::string_view kLabelHeader = "X-Selzip-Label";
inline constexpr std::string_view kItemHeader = "X-Selzip-Item";
inline constexpr std::string_view kUploadPath = "/upload";

/// Latency breakdown of one transfer. `total` is the client-side composition
/// overhead + compression + transmission; server-side decompression is kept
/// separately.
struct TransferOutcome {
    std::string item_id;
    Action action_taken = Action::SendRaw;
    std::uint64_t original_bytes = 0;
    std::uint64_t bytes_on_wire = 0;
    double overhead = 0.0;
    double compression_time = 0.0;
    double transmission_time = 0.0;
    double decompression_time = 0.0;
    double total = 0.0;
    bool codec_fallback = false;
    bool integrity_ok = true;

    /// Client total plus server decompression.
    double end_to_end() const noexcept { return total + decompression_time; }
};

/// Fills `total` from the components.
TransferOutcome& finalize(TransferOutcome& o) noexcept;

/// Server acknowledgment carried in the response body as JSON.
struct Acknowledgment {
    std::string item_id;
    std::uint64_t received_bytes = 0;
    std::uint64_t decompressed_bytes = 0;
    double decompression_time = 0.0;
    std::uint32_t crc32 = 0;  // of the decompressed payload
};

std::string encode_ack(const Acknowledgment& ack);
Acknowledgment decode_ack(std::string_view body);

/// Raised when the request could not be completed. Carries the timings
/// measured before the failure.
class TransportError : public Error {
public:
    TransportError(const std::string& what, TransferOutcome partial, bool retryable = true)
        : Error("transport", what), partial_(std::move(partial)), retryable_(retryable) {}

    const TransferOutcome& partial() const noexcept { return partial_; }
    bool retryable() const noexcept { return retryable_; }

private:
    TransferOutcome partial_;
    bool retryable_;
};

/// Cloud-side endpoint: accepts uploads, decompresses them when a codec is
/// declared, and acknowledges with byte counts and decompression time.
class TransferServer {
public:
    using PayloadObserver = std::function<void(const std::string& item_id, ByteView payload)>;

    TransferServer();
    ~TransferServer();
    TransferServer(const TransferServer&) = delete;
    TransferServer& operator=(const TransferServer&) = delete;

    /// Binds and serves on a background thread; `port` 0 picks a free one.
    /// Returns the bound port.
    int start(const std::string& host, int port = 0);

    /// Binds and serves on the calling thread until stop().
    void run(const std::string& host, int port);

    void stop();
    int port() const noexcept { return port_; }

    /// Called with every successfully decoded payload. Set before start().
    void set_observer(PayloadObserver observer) { observer_ = std::move(observer); }

private:
    void install_routes();

    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    PayloadObserver observer_;
    int port_ = 0;
};

/// Edge-side client. One instance per connection; not shared across threads.
class TransferClient {
public:
    TransferClient(const std::string& host, int port, const Codec& codec,
                   ThroughputEstimator* estimator = nullptr);
    ~TransferClient();
    TransferClient(const TransferClient&) = delete;
    TransferClient& operator=(const TransferClient&) = delete;

    /// Enables token-bucket pacing of request bodies at the link rate.
    void set_link(std::optional<LinkSpec> link) { link_ = link; }

    /// Executes `decision`. `decision_overhead` is the time already spent
    /// deciding and is folded into the outcome's overhead. Feeds a
    /// throughput sample to the estimator when one is attached.
    TransferOutcome send(const TransferItem& item, const Decision& decision, std::string_view item_id,
                         double decision_overhead = 0.0);

private:
    std::unique_ptr<httplib::Client> client_;
    const Codec& codec_;
    ThroughputEstimator* estimator_;
    std::optional<LinkSpec> link_;
};

}  // namespace selzip
