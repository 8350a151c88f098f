#include "airtrust/adsb/crc24.hpp"

#include <array>

namespace airtrust::adsb {

namespace {

std::array<uint32_t, 256> make_crc_table() {
    std::array<uint32_t, 256> table{};
    for (uint32_t n = 0; n < 256; ++n) {
        uint32_t crc = n << 16;
        for (int k = 0; k < 8; ++k) {
            if (crc & 0x800000)
                crc = ((crc << 1) ^ kCrcPoly) & 0xFFFFFF;
            else
                crc = (crc << 1) & 0xFFFFFF;
        }
        table[n] = crc;
    }
    return table;
}

const std::array<uint32_t, 256> kTable = make_crc_table();

}  // namespace

uint32_t crc24(std::span<const uint8_t> bytes) {
    uint32_t crc = 0;
    for (uint8_t b : bytes) {
        crc = kTable[((crc >> 16) ^ b) & 0xff] ^ ((crc << 8) & 0xFFFFFF);
    }
    return crc & 0xFFFFFF;
}

uint32_t crc24(const RawFrame& frame) {
    return crc24(std::span<const uint8_t>(frame.bits.data(), frame.bits.size()));
}

}  // namespace airtrust::adsb
