#pragma once

#include <cmath>

namespace airtrust::geo {

// Mean earth radius shared by the tracker and the simulator so implied-speed
// checks see exactly the kinematics the simulator produced.
inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kMetersPerNm = 1852.0;
inline constexpr double kKnotMps = 1852.0 / 3600.0;
inline constexpr double kFtPerMinToMps = 0.3048 / 60.0;

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

// Wraps any angle into [0, 360).
inline double wrap360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0) w += 360.0;
    return w;
}

// Signed smallest rotation from `from_deg` to `to_deg`, in [-180, 180].
inline double heading_delta(double from_deg, double to_deg) {
    double d = std::fmod(to_deg - from_deg + 540.0, 360.0) - 180.0;
    return d;
}

double haversine_m(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

struct LatLon {
    double lat_deg;
    double lon_deg;
};

// Great-circle advance by `dist_m` along initial bearing `bearing_deg`.
LatLon advance(double lat_deg, double lon_deg, double bearing_deg, double dist_m);

// Initial great-circle bearing from point 1 to point 2, in [0, 360).
double initial_bearing_deg(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

}  // namespace airtrust::geo
