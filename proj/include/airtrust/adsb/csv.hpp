#pragma once

#include <istream>
#include <string>
#include <vector>

#include "airtrust/adsb/types.hpp"

namespace airtrust::adsb {

struct HeaderError : std::runtime_error {
    explicit HeaderError(const std::string& what) : std::runtime_error(what) {}
};
struct EmptyInput : std::runtime_error {
    explicit EmptyInput(const std::string& what) : std::runtime_error(what) {}
};

struct SkippedRow {
    size_t line_no;  // 1-based, header is line 1
    std::string reason;
};

struct CsvResult {
    std::vector<AdsbRecord> records;  // input order
    std::vector<SkippedRow> skipped;
    size_t data_rows = 0;  // records.size() + skipped.size()
};

// Flightradar24-style export reader. Requires timestamp, icao, lat, lon,
// altitude, speed and track columns (alias table maps common variants);
// unknown extra columns are ignored. Malformed rows are skipped and counted
// with their line number, never silently dropped.
CsvResult ingest_csv(std::istream& in);
CsvResult ingest_csv(const std::string& text);

// Writer producing the exact column set ingest_csv consumes; used by the
// simulator's record stream.
std::string records_to_csv(const std::vector<AdsbRecord>& records);

}  // namespace airtrust::adsb
