#include "airtrust/fog/dispatch.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "airtrust/common/numfmt.hpp"

namespace airtrust::fog {

void FileSink::deliver(const std::string& line) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw SinkUnavailable("cannot open " + path_);
    out << line << "\n";
    if (!out) throw SinkUnavailable("write failed on " + path_);
}

void WebhookSink::deliver(const std::string& line) {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(2, 0);
    auto res = client.Post(path_, line, "application/json");
    if (!res || res->status >= 300)
        throw SinkUnavailable("webhook " + host_ + ":" + std::to_string(port_) +
                              " status " + (res ? std::to_string(res->status) : "none"));
}

std::string AlertDispatcher::render(const Alert& alert) {
    std::string out = "{";
    out += "\"icao\":\"" + alert.icao + "\"";
    out += ",\"score\":" + format_fixed(alert.score, 6);
    out += ",\"threshold\":" + format_fixed(alert.threshold, 6);
    out += ",\"first_seen\":" + format_fixed(alert.first_seen, 6);
    out += ",\"decided_at\":" + format_fixed(alert.decided_at, 6);
    out += ",\"message\":" + nlohmann::json(alert.message).dump();
    out += "}";
    return out;
}

Alert AlertDispatcher::dispatch(Alert alert) {
    std::string triple = alert.icao + "|" + format_fixed(alert.first_seen, 3) + "|" +
                         format_fixed(alert.decided_at, 3);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (seen_triples_.count(triple)) {
            stats_.suppressed++;
            return alert;
        }
        auto it = last_delivered_.find(alert.icao);
        if (it != last_delivered_.end() &&
            alert.decided_at - it->second < suppress_window_s_) {
            stats_.suppressed++;
            seen_triples_.insert(triple);
            return alert;
        }
        seen_triples_.insert(triple);
        last_delivered_[alert.icao] = alert.decided_at;
    }

    std::string line = render(alert);
    int backoff_ms = backoff_start_ms_;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        try {
            sink_->deliver(line);
            alert.sink_ack = true;
            std::lock_guard<std::mutex> lock(mutex_);
            stats_.delivered++;
            return alert;
        } catch (const SinkUnavailable&) {
            if (attempt == max_retries_) break;
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
    }

    std::ofstream dead(dead_letter_path_, std::ios::app);
    if (dead) dead << line << "\n";
    std::lock_guard<std::mutex> lock(mutex_);
    stats_.dead_lettered++;
    return alert;
}

}  // namespace airtrust::fog
