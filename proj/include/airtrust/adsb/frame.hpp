#pragma once

#include <string_view>

#include "airtrust/adsb/types.hpp"

namespace airtrust::adsb {

// Normalizes 28 hex chars (case-insensitive, separators allowed) into a frame.
// Throws FrameLengthError when the cleaned text is not exactly 14 octets.
RawFrame frame_from_hex(std::string_view hex, double received_at);

// DF17 decode: type codes 1-4 -> Identification, 9-18 -> AirbornePosition,
// 19 (subtypes 1-2) -> AirborneVelocity; everything else Unsupported with
// icao/type_code populated. Throws CrcError / NonAdsbFrame.
DecodedMessage parse_frame(std::string_view hex, double received_at);
DecodedMessage parse_frame(const RawFrame& frame);

}  // namespace airtrust::adsb
