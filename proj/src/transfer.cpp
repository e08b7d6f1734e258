#include "selzip/transfer.hpp"

#include <chrono>

#include <httplib.h>
#include <json.hpp>

namespace selzip {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", message}}.dump(), "application/json");
}

}  // namespace

TransferOutcome& finalize(TransferOutcome& o) noexcept {
    o.total = o.overhead + o.compression_time + o.transmission_time;
    return o;
}

std::string encode_ack(const Acknowledgment& ack) {
    return json{{"item", ack.item_id},
                {"received_bytes", ack.received_bytes},
                {"decompressed_bytes", ack.decompressed_bytes},
                {"decompression_time", ack.decompression_time},
                {"crc32", ack.crc32}}
        .dump();
}

Acknowledgment decode_ack(std::string_view body) {
    try {
        json j = json::parse(body);
        Acknowledgment ack;
        ack.item_id = j.value("item", std::string{});
        ack.received_bytes = j.at("received_bytes").get<std::uint64_t>();
        ack.decompressed_bytes = j.at("decompressed_bytes").get<std::uint64_t>();
        ack.decompression_time = j.at("decompression_time").get<double>();
        ack.crc32 = j.at("crc32").get<std::uint32_t>();
        return ack;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed acknowledgment: ") + e.what());
    }
}

TransferServer::TransferServer() : server_(std::make_unique<httplib::Server>()) { server_->set_tcp_nodelay(true); }

TransferServer::~TransferServer() { stop(); }

void TransferServer::install_routes() {
    server_->Post(std::string(kUploadPath), [this](const httplib::Request& req, httplib::Response& res) {
        std::string codec_id = req.has_header(std::string(kCodecHeader).c_str())
                                   ? req.get_header_value(std::string(kCodecHeader).c_str())
                                   : "identity";
        auto codec = make_codec(codec_id);
        if (!codec) {
            reply_error(res, 400, "unsupported codec '" + codec_id + "'");
            return;
        }
        Acknowledgment ack;
        ack.item_id = req.get_header_value(std::string(kItemHeader).c_str());
        ack.received_bytes = req.body.size();

        Bytes decoded;
        if (codec->id() == "identity") {
            decoded.assign(req.body.begin(), req.body.end());
        } else {
            auto start = Clock::now();
            try {
                decoded = codec->decompress(as_bytes(req.body));
            } catch (const CodecError& e) {
                reply_error(res, 422, e.what());
                return;
            }
            ack.decompression_time = seconds_between(start, Clock::now());
        }
        ack.decompressed_bytes = decoded.size();
        ack.crc32 = crc32_of(decoded);
        if (observer_) observer_(ack.item_id, decoded);
        res.set_content(encode_ack(ack), "application/json");
    });
    server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) reply_error(res, res.status, "request rejected");
    });
}

int TransferServer::start(const std::string& host, int port) {
    install_routes();
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ <= 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void TransferServer::run(const std::string& host, int port) {
    install_routes();
    port_ = port;
    if (!server_->listen(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
}

void TransferServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

TransferClient::TransferClient(const std::string& host, int port, const Codec& codec,
                               ThroughputEstimator* estimator)
    : client_(std::make_unique<httplib::Client>(host, port)), codec_(codec), estimator_(estimator) {
    client_->set_keep_alive(true);
    client_->set_tcp_nodelay(true);
    client_->set_read_timeout(120, 0);
    client_->set_write_timeout(120, 0);
}

TransferClient::~TransferClient() = default;

TransferOutcome TransferClient::send(const TransferItem& item, const Decision& decision,
                                     std::string_view item_id, double decision_overhead) {
    auto prep_start = Clock::now();
    TransferOutcome out;
    out.item_id = std::string(item_id);
    out.original_bytes = item.size();
    out.action_taken = decision.action;

    const Bytes* body = &item.payload();
    Bytes compressed;
    if (decision.action == Action::Compress) {
        auto start = Clock::now();
        try {
            compressed = codec_.compress(item.payload());
            out.compression_time = seconds_between(start, Clock::now());
            body = &compressed;
        } catch (const CodecError&) {
            out.action_taken = Action::SendRaw;
            out.codec_fallback = true;
        }
    }
    out.bytes_on_wire = body->size();

    httplib::Headers headers{
        {std::string(kCodecHeader), out.action_taken == Action::Compress ? codec_.id() : "identity"},
        {std::string(kLabelHeader), item.label().str()},
        {std::string(kItemHeader), out.item_id},
    };
    double bookkeeping = seconds_between(prep_start, Clock::now()) - out.compression_time;

    auto send_start = Clock::now();
    if (link_ && link_->rtt > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(link_->rtt));
    httplib::Result res;
    const auto* data = reinterpret_cast<const char*>(body->data());
    if (link_) {
        httplib::DataSink* current = nullptr;
        ShapedWriter writer(*link_, [&current](const char* p, std::size_t n) { return current->write(p, n); });
        res = client_->Post(
            std::string(kUploadPath), headers, body->size(),
            [data, &writer, &current](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                current = &sink;
                return writer.write(data + offset, length);
            },
            "application/octet-stream");
    } else {
        res = client_->Post(std::string(kUploadPath), headers, data, body->size(), "application/octet-stream");
    }
    double round_trip = seconds_between(send_start, Clock::now());

    auto fail = [&](const std::string& what, bool retryable) {
        out.transmission_time = round_trip;
        out.overhead = decision_overhead + bookkeeping;
        finalize(out);
        return TransportError(what, out, retryable);
    };
    if (!res) throw fail("request failed: " + httplib::to_string(res.error()), true);
    if (res->status != 200)
        throw fail("server answered " + std::to_string(res->status) + ": " + res->body, res->status >= 500);

    auto post_start = Clock::now();
    Acknowledgment ack = decode_ack(res->body);
    out.decompression_time = ack.decompression_time;
    out.transmission_time = std::max(0.0, round_trip - ack.decompression_time);
    out.integrity_ok = ack.received_bytes == out.bytes_on_wire && ack.decompressed_bytes == item.size() &&
                       ack.crc32 == crc32_of(item.payload());
    bookkeeping += seconds_between(post_start, Clock::now());
    out.overhead = decision_overhead + bookkeeping;
    finalize(out);

    if (estimator_) {
        ThroughputSample sample{out.bytes_on_wire, out.transmission_time};
        if (sample.valid()) estimator_->add_sample(sample);
    }
    return out;
}

}  // namespace selzip
