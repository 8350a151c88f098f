#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "airtrust/fog/fusion.hpp"

namespace airtrust::fog {

struct SinkUnavailable : std::runtime_error {
    explicit SinkUnavailable(const std::string& what) : std::runtime_error(what) {}
};

// Destination for accepted alerts: newline-delimited JSON file or an HTTP
// webhook. deliver() throws SinkUnavailable on failure.
class AlertSink {
public:
    virtual ~AlertSink() = default;
    virtual void deliver(const std::string& line) = 0;
};

class FileSink : public AlertSink {
public:
    explicit FileSink(std::string path) : path_(std::move(path)) {}
    void deliver(const std::string& line) override;

private:
    std::string path_;
};

class WebhookSink : public AlertSink {
public:
    WebhookSink(std::string host, int port, std::string path)
        : host_(std::move(host)), port_(port), path_(std::move(path)) {}
    void deliver(const std::string& line) override;

private:
    std::string host_;
    int port_;
    std::string path_;
};

// In-memory sink for tests and the in-process pipeline.
class MemorySink : public AlertSink {
public:
    void deliver(const std::string& line) override {
        std::lock_guard<std::mutex> lock(mutex_);
        lines_.push_back(line);
    }
    std::vector<std::string> lines() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return lines_;
    }

private:
    mutable std::mutex mutex_;
    std::vector<std::string> lines_;
};

struct DispatchStats {
    uint64_t delivered = 0;
    uint64_t suppressed = 0;
    uint64_t dead_lettered = 0;
};

// Exactly-once per (icao, first_seen, decided_at); repeats for the same icao
// inside the suppression window are dropped. Failed deliveries retry 3x with
// exponential backoff, then land in the dead-letter file.
class AlertDispatcher {
public:
    AlertDispatcher(std::shared_ptr<AlertSink> sink, std::string dead_letter_path,
                    double suppress_window_s = 60.0, int max_retries = 3,
                    int backoff_start_ms = 10)
        : sink_(std::move(sink)),
          dead_letter_path_(std::move(dead_letter_path)),
          suppress_window_s_(suppress_window_s),
          max_retries_(max_retries),
          backoff_start_ms_(backoff_start_ms) {}

    // Returns the alert with sink_ack set when it reached the sink.
    Alert dispatch(Alert alert);

    const DispatchStats& stats() const { return stats_; }

    static std::string render(const Alert& alert);

private:
    std::shared_ptr<AlertSink> sink_;
    std::string dead_letter_path_;
    double suppress_window_s_;
    int max_retries_;
    int backoff_start_ms_;

    std::mutex mutex_;
    std::map<std::string, double> last_delivered_;  // icao -> decided_at
    std::set<std::string> seen_triples_;
    DispatchStats stats_;
};

}  // namespace airtrust::fog
