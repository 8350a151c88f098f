#include "airtrust/adsb/cpr.hpp"

#include <cmath>

namespace airtrust::adsb {

namespace {

double pmod(double a, double b) {
    double r = std::fmod(a, b);
    if (r < 0) r += b;
    return r;
}

int imod(int a, int b) {
    int r = a % b;
    if (r < 0) r += b;
    return r;
}

}  // namespace

int cpr_nl(double lat_deg) {
    double lat = std::fabs(lat_deg);
    if (lat == 0.0) return 59;
    if (lat >= 87.0) return lat > 87.0 ? 1 : 2;
    double nz = static_cast<double>(kCprNz);
    double a = 1.0 - std::cos(M_PI / (2.0 * nz));
    double c = std::cos(M_PI / 180.0 * lat);
    double nl = 2.0 * M_PI / std::acos(1.0 - a / (c * c));
    return static_cast<int>(std::floor(nl));
}

Position cpr_decode_global(const CprFrame& even, const CprFrame& odd) {
    if (even.parity != CprParity::Even || odd.parity != CprParity::Odd)
        throw RangeError("pair must be one even and one odd frame");
    if (std::fabs(even.t - odd.t) > 10.0)
        throw StalePair("even/odd frames more than 10 s apart");

    const double dlat_even = 360.0 / (4.0 * kCprNz);
    const double dlat_odd = 360.0 / (4.0 * kCprNz - 1.0);

    double lat_e = even.lat_cpr / kCprScale;
    double lat_o = odd.lat_cpr / kCprScale;

    int j = static_cast<int>(std::floor(59.0 * lat_e - 60.0 * lat_o + 0.5));
    double rlat_even = dlat_even * (imod(j, 60) + lat_e);
    double rlat_odd = dlat_odd * (imod(j, 59) + lat_o);
    if (rlat_even >= 270.0) rlat_even -= 360.0;
    if (rlat_odd >= 270.0) rlat_odd -= 360.0;

    if (std::fabs(rlat_even) > kCprMaxLatDeg || std::fabs(rlat_odd) > kCprMaxLatDeg)
        throw RangeError("latitude outside supported band");
    if (cpr_nl(rlat_even) != cpr_nl(rlat_odd))
        throw PositionAmbiguous("frames fall in different latitude zones");

    bool use_even = even.t >= odd.t;
    double rlat = use_even ? rlat_even : rlat_odd;
    int nl = cpr_nl(rlat);
    int parity = use_even ? 0 : 1;
    int ni = std::max(nl - parity, 1);

    double lon_e = even.lon_cpr / kCprScale;
    double lon_o = odd.lon_cpr / kCprScale;
    int m = static_cast<int>(std::floor(lon_e * (nl - 1) - lon_o * nl + 0.5));
    double lon_cpr = use_even ? lon_e : lon_o;
    double lon = (360.0 / ni) * (imod(m, ni) + lon_cpr);
    if (lon >= 180.0) lon -= 360.0;

    return {rlat, lon};
}

CprFrame cpr_encode(double lat_deg, double lon_deg, CprParity parity, double t) {
    if (std::fabs(lat_deg) > kCprMaxLatDeg)
        throw RangeError("latitude outside supported band");
    if (lon_deg <= -180.0 || lon_deg > 180.0)
        throw RangeError("longitude outside (-180, 180]");

    int p = (parity == CprParity::Odd) ? 1 : 0;
    double dlat = 360.0 / (4.0 * kCprNz - p);

    uint32_t yz = static_cast<uint32_t>(
                      std::floor(kCprScale * pmod(lat_deg, dlat) / dlat + 0.5)) %
                  static_cast<uint32_t>(kCprScale);
    double rlat = dlat * (yz / kCprScale + std::floor(lat_deg / dlat));

    double dlon = 360.0 / std::max(cpr_nl(rlat) - p, 1);
    uint32_t xz = static_cast<uint32_t>(
                      std::floor(kCprScale * pmod(lon_deg, dlon) / dlon + 0.5)) %
                  static_cast<uint32_t>(kCprScale);

    CprFrame f;
    f.parity = parity;
    f.lat_cpr = yz;
    f.lon_cpr = xz;
    f.t = t;
    return f;
}

}  // namespace airtrust::adsb
