#pragma once

#include <utility>

#include "airtrust/adsb/types.hpp"

namespace airtrust::adsb {

// Latitude zone count; 4*NZ-1 and 4*NZ zones for odd/even encodings.
inline constexpr int kCprNz = 15;
inline constexpr double kCprScale = 131072.0;  // 2^17

// Decode restricted to |lat| <= 87 deg; beyond that zone arithmetic collapses
// and RangeError is raised.
inline constexpr double kCprMaxLatDeg = 87.0;

struct Position {
    double lat_deg;
    double lon_deg;
};

// Number of longitude zones at a latitude (the NL function).
int cpr_nl(double lat_deg);

// Globally unambiguous decode from one even and one odd frame of the same
// aircraft. The more recent frame selects the reported zone. Throws StalePair
// when |t_even - t_odd| > 10 s, PositionAmbiguous when the frames fall in
// different latitude zones, RangeError above |lat| 87.
Position cpr_decode_global(const CprFrame& even, const CprFrame& odd);

// 17-bit encoding; decode(encode_even(p), encode_odd(p)) lands within one
// quantization step of p. Throws RangeError outside the supported band.
CprFrame cpr_encode(double lat_deg, double lon_deg, CprParity parity, double t = 0.0);

}  // namespace airtrust::adsb
