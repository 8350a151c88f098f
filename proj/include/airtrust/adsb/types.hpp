#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace airtrust::adsb {

// 112-bit extended squitter frame plus receive time (seconds, ms precision).
struct RawFrame {
    std::array<uint8_t, 14> bits{};
    double received_at = 0.0;
};

struct FrameLengthError : std::runtime_error {
    explicit FrameLengthError(const std::string& what) : std::runtime_error(what) {}
};
struct CrcError : std::runtime_error {
    explicit CrcError(const std::string& what) : std::runtime_error(what) {}
};
struct NonAdsbFrame : std::runtime_error {
    explicit NonAdsbFrame(const std::string& what) : std::runtime_error(what) {}
};
struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};
struct StalePair : std::runtime_error {
    explicit StalePair(const std::string& what) : std::runtime_error(what) {}
};
struct PositionAmbiguous : std::runtime_error {
    explicit PositionAmbiguous(const std::string& what) : std::runtime_error(what) {}
};

enum class CprParity : uint8_t { Even = 0, Odd = 1 };

struct CprFrame {
    CprParity parity = CprParity::Even;
    uint32_t lat_cpr = 0;  // 17-bit
    uint32_t lon_cpr = 0;  // 17-bit
    double t = 0.0;
};

struct Identification {
    std::string callsign;  // trailing spaces trimmed
};

struct AirbornePosition {
    CprFrame cpr;
    int altitude_ft = 0;
};

struct AirborneVelocity {
    double ground_speed_kt = 0.0;
    double track_deg = 0.0;  // [0, 360)
    int vertical_rate_fpm = 0;
};

struct Unsupported {};

struct DecodedMessage {
    int downlink_format = 0;
    std::string icao;  // 6 uppercase hex chars
    int type_code = 0;
    std::variant<Identification, AirbornePosition, AirborneVelocity, Unsupported> payload = Unsupported{};
};

// Canonical aircraft state record exchanged between tiers.
struct AdsbRecord {
    std::string icao;
    std::optional<std::string> callsign;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    int altitude_ft = 0;
    double ground_speed_kt = 0.0;
    double track_deg = 0.0;
    int vertical_rate_fpm = 0;
    double timestamp = 0.0;
};

// JSON object with exactly the record's field names, keys in declaration
// order; callsign omitted when absent.
std::string record_to_json(const AdsbRecord& r);
AdsbRecord record_from_json(const std::string& text);

}  // namespace airtrust::adsb
