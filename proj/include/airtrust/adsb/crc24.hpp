#pragma once

#include <cstdint>
#include <span>

#include "airtrust/adsb/types.hpp"

namespace airtrust::adsb {

// Mode-S CRC generator polynomial (x^24 + ... + 1, low 24 bits).
inline constexpr uint32_t kCrcPoly = 0xFFF409;

// 24-bit remainder over the full 112-bit frame; 0 means the frame's parity
// field is consistent with the message bits.
uint32_t crc24(const RawFrame& frame);

// Bytewise variant used internally and by frame synthesis in the simulator.
uint32_t crc24(std::span<const uint8_t> bytes);

}  // namespace airtrust::adsb
