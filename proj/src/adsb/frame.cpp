#include "airtrust/adsb/frame.hpp"

#include <cmath>

#include "airtrust/adsb/crc24.hpp"
#include "airtrust/common/geo.hpp"
#include "airtrust/common/hex.hpp"

namespace airtrust::adsb {

namespace {

// 6-bit identification alphabet; '?' marks codes that never appear in valid
// callsigns.
constexpr std::string_view kCallsignCharset =
    "?ABCDEFGHIJKLMNOPQRSTUVWXYZ????? ???????????????0123456789??????";

std::string decode_callsign(const std::array<uint8_t, 14>& m) {
    // ME bytes 1..6 hold eight 6-bit characters.
    uint8_t codes[8] = {
        static_cast<uint8_t>(m[5] >> 2),
        static_cast<uint8_t>(((m[5] & 0x03) << 4) | (m[6] >> 4)),
        static_cast<uint8_t>(((m[6] & 0x0f) << 2) | (m[7] >> 6)),
        static_cast<uint8_t>(m[7] & 0x3f),
        static_cast<uint8_t>(m[8] >> 2),
        static_cast<uint8_t>(((m[8] & 0x03) << 4) | (m[9] >> 4)),
        static_cast<uint8_t>(((m[9] & 0x0f) << 2) | (m[10] >> 6)),
        static_cast<uint8_t>(m[10] & 0x3f),
    };
    std::string cs;
    for (uint8_t c : codes) cs.push_back(kCallsignCharset[c]);
    while (!cs.empty() && cs.back() == ' ') cs.pop_back();
    return cs;
}

// 12-bit altitude field with Q=1 (25 ft increments). Q=0 Gillham encodings
// fall outside the airborne scope here and decode to 0.
int decode_ac12(const std::array<uint8_t, 14>& m) {
    if ((m[5] & 0x01) == 0) return 0;
    int n = ((m[5] >> 1) << 4) | ((m[6] & 0xf0) >> 4);
    return n * 25 - 1000;
}

AirborneVelocity decode_velocity(const std::array<uint8_t, 14>& m, int subtype) {
    AirborneVelocity v;
    int mult = (subtype == 2) ? 4 : 1;  // supersonic subtype scales by 4

    int ew_sign = (m[5] & 0x04) >> 2;
    int ew_raw = ((m[5] & 0x03) << 8) | m[6];
    int ns_sign = (m[7] & 0x80) >> 7;
    int ns_raw = ((m[7] & 0x7f) << 3) | ((m[8] & 0xe0) >> 5);

    double vx = 0.0, vy = 0.0;  // east, north components in kt
    if (ew_raw != 0) vx = (ew_raw - 1) * mult * (ew_sign ? -1.0 : 1.0);
    if (ns_raw != 0) vy = (ns_raw - 1) * mult * (ns_sign ? -1.0 : 1.0);

    v.ground_speed_kt = std::hypot(vx, vy);
    if (v.ground_speed_kt > 0)
        v.track_deg = geo::wrap360(geo::rad2deg(std::atan2(vx, vy)));

    int vr_sign = (m[8] & 0x08) >> 3;
    int vr_raw = ((m[8] & 0x07) << 6) | ((m[9] & 0xfc) >> 2);
    if (vr_raw != 0) v.vertical_rate_fpm = (vr_raw - 1) * 64 * (vr_sign ? -1 : 1);
    return v;
}

}  // namespace

RawFrame frame_from_hex(std::string_view hex, double received_at) {
    auto bytes = from_hex(hex);
    if (!bytes || bytes->size() != 14)
        throw FrameLengthError("frame must be 14 octets (28 hex chars)");
    RawFrame f;
    std::copy(bytes->begin(), bytes->end(), f.bits.begin());
    f.received_at = received_at;
    return f;
}

DecodedMessage parse_frame(const RawFrame& frame) {
    if (crc24(frame) != 0) throw CrcError("CRC remainder nonzero");

    const auto& m = frame.bits;
    int df = m[0] >> 3;
    if (df != 17) throw NonAdsbFrame("downlink format " + std::to_string(df));

    DecodedMessage out;
    out.downlink_format = df;
    out.icao = to_hex(m.data() + 1, 3, /*upper=*/true);
    out.type_code = m[4] >> 3;

    int tc = out.type_code;
    if (tc >= 1 && tc <= 4) {
        out.payload = Identification{decode_callsign(m)};
    } else if (tc >= 9 && tc <= 18) {
        CprFrame cpr;
        cpr.parity = (m[6] & 0x04) ? CprParity::Odd : CprParity::Even;
        cpr.lat_cpr = ((m[6] & 0x03) << 15) | (m[7] << 7) | (m[8] >> 1);
        cpr.lon_cpr = ((m[8] & 0x01) << 16) | (m[9] << 8) | m[10];
        cpr.t = frame.received_at;
        out.payload = AirbornePosition{cpr, decode_ac12(m)};
    } else if (tc == 19) {
        int subtype = m[4] & 0x07;
        if (subtype == 1 || subtype == 2)
            out.payload = decode_velocity(m, subtype);
        else
            out.payload = Unsupported{};  // airspeed subtypes 3/4
    } else {
        out.payload = Unsupported{};
    }
    return out;
}

DecodedMessage parse_frame(std::string_view hex, double received_at) {
    return parse_frame(frame_from_hex(hex, received_at));
}

}  // namespace airtrust::adsb
